#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ionquench::cli {

/// 15 significant digits, '.' decimal, integral values keep a trailing ".0",
/// negative zero prints as 0.0 and NaN as "nan".
std::string format_number(double x);

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

    /// Cells are written as given; use format_number for doubles.
    void row(const std::vector<std::string>& cells);
    void close();

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

/// Ordered "[section]" / "key = value" text.
class Manifest {
public:
    void section(std::string name);
    void set(std::string key, std::string value);
    void set(std::string key, double value) { set(std::move(key), format_number(value)); }
    void set(std::string key, int value) { set(std::move(key), std::to_string(value)); }

    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    struct Section {
        std::string name;
        std::vector<std::pair<std::string, std::string>> entries;
    };
    std::vector<Section> sections_;
};

}  // namespace ionquench::cli
