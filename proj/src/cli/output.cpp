#include "ionquench/cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace ionquench::cli {

std::string format_number(double x) {
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    if (x == 0.0)
        return "0.0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    std::string s(buf);
    if (s.find_first_of(".e") == std::string::npos)
        s += ".0";
    return s;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
    if (!out_)
        throw std::runtime_error("cannot write " + path.string());
    bool first = true;
    for (std::string_view h : header) {
        if (!first)
            out_ << ',';
        out_ << h;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
        throw std::logic_error("csv row width mismatch in " + path_.string());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail())
        throw std::runtime_error("failed writing " + path_.string());
}

void Manifest::section(std::string name) { sections_.push_back({std::move(name), {}}); }

void Manifest::set(std::string key, std::string value) {
    if (sections_.empty())
        section("run");
    sections_.back().entries.emplace_back(std::move(key), std::move(value));
}

std::string Manifest::str() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < sections_.size(); ++i) {
        if (i)
            out << '\n';
        out << '[' << sections_[i].name << "]\n";
        for (const auto& [key, value] : sections_[i].entries)
            out << key << " = " << value << '\n';
    }
    return out.str();
}

void Manifest::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << str();
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
}

}  // namespace ionquench::cli
