#include "ionquench/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ionquench/crystal.hpp"

namespace ionquench::cli {

namespace pt = boost::property_tree;

namespace {

constexpr double two_pi = 2.0 * constants::pi;

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"species", {"mass_u", "charge_e"}},
        {"trap", {"ion_count", "nu_x_mhz", "nu_y_mhz", "nu_dip_mhz", "g", "delta"}},
        {"time", {"t_max_us", "samples"}},
        {"spectrum", {"periods", "samples_per_period", "window_us", "peak_threshold", "omega_max"}},
        {"sweep", {"g_min", "g_max", "g_steps", "delta_min", "delta_max", "delta_steps", "ion_counts"}},
        {"revivals", {"threshold"}},
        {"output", {"path", "format"}},
    };
    return keys;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    template <typename T>
    std::optional<T> get(const std::string& section, const std::string& key) const {
        const auto node = tree_.get_child_optional(pt::ptree::path_type(section + "." + key, '.'));
        if (!node)
            return std::nullopt;
        const std::string text = node->data();
        std::istringstream in(text);
        in.imbue(std::locale::classic());
        T value{};
        if (!(in >> value) || !(in >> std::ws).eof())
            throw ConfigError(section + "." + key + ": cannot parse '" + text + "'");
        if constexpr (std::is_floating_point_v<T>) {
            if (!std::isfinite(value))
                throw ConfigError(section + "." + key + ": must be finite");
        }
        return value;
    }

    std::optional<std::string> text(const std::string& section, const std::string& key) const {
        const auto node = tree_.get_child_optional(pt::ptree::path_type(section + "." + key, '.'));
        if (!node)
            return std::nullopt;
        return node->data();
    }

private:
    const pt::ptree& tree_;
};

void check_known_keys(const pt::ptree& tree) {
    for (const auto& [section, body] : tree) {
        const auto found = schema().find(section);
        if (found == schema().end())
            throw ConfigError("unknown section [" + section + "]");
        for (const auto& [key, value] : body)
            if (!found->second.contains(key))
                throw ConfigError(section + "." + key + ": unknown key");
    }
}

std::optional<Range> read_range(const Reader& r, const std::string& axis) {
    const auto lo = r.get<double>("sweep", axis + "_min");
    const auto hi = r.get<double>("sweep", axis + "_max");
    const auto steps = r.get<int>("sweep", axis + "_steps");
    if (!lo && !hi && !steps)
        return std::nullopt;
    if (!lo || !hi || !steps)
        throw ConfigError("sweep." + axis + ": " + axis + "_min, " + axis + "_max and " + axis +
                          "_steps must be given together");
    if (*steps < 1)
        throw ConfigError("sweep." + axis + "_steps: must be >= 1");
    if (*hi < *lo)
        throw ConfigError("sweep." + axis + "_max: must not be below " + axis + "_min");
    return Range{*lo, *hi, *steps};
}

std::vector<int> read_ion_counts(const std::string& text) {
    std::vector<int> counts;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::istringstream one(item);
        int n = 0;
        if (!(one >> n) || !(one >> std::ws).eof())
            throw ConfigError("sweep.ion_counts: cannot parse '" + item + "'");
        counts.push_back(n);
    }
    if (counts.empty())
        throw ConfigError("sweep.ion_counts: empty list");
    return counts;
}

void require_ion_count(int n, const std::string& field) {
    if (n < 3 || n % 2 == 0)
        throw ConfigError(field + ": ion count must be odd and >= 3, got " + std::to_string(n));
}

void require_positive(double x, const std::string& field) {
    if (!(x > 0.0))
        throw ConfigError(field + ": must be positive");
}

}  // namespace

Eigen::VectorXd Range::values() const {
    if (steps == 1)
        return Eigen::VectorXd::Constant(1, min);
    return Eigen::VectorXd::LinSpaced(steps, min, max);
}

double ScenarioConfig::nu_x() const { return two_pi * nu_x_mhz * 1e6; }

double ScenarioConfig::hbar_tilde() const { return reduced_hbar(mass_u, charge_e, nu_x()); }

double ScenarioConfig::time_unit() const { return 1.0 / nu_x(); }

TrapSpec ScenarioConfig::trap_spec(int n) const {
    if (!has_point())
        throw ConfigError("trap: needs nu_y_mhz and nu_dip_mhz, or g and delta");
    TrapSpec spec;
    spec.ion_count = n;
    spec.ion_mass = mass_u;
    spec.ion_charge = charge_e;
    spec.nu_x = nu_x();
    if (nu_y_mhz) {
        spec.nu_y = two_pi * *nu_y_mhz * 1e6;
        spec.nu_dip = two_pi * *nu_dip_mhz * 1e6;
    } else {
        const double nu_c = critical_frequency(spec.nu_x, critical_aspect_ratio(n));
        spec.nu_y = transverse_from_g(*g, nu_c);
        spec.nu_dip = dip_from_delta(*delta, nu_c);
    }
    return spec;
}

double ScenarioConfig::resolved_delta(int n) const {
    if (delta)
        return *delta;
    if (nu_dip_mhz)
        return resolve_dimensionless(trap_spec(n)).delta;
    throw ConfigError("trap: needs delta or nu_dip_mhz (or a [sweep] delta range)");
}

std::vector<int> ScenarioConfig::sweep_ion_counts() const {
    return ion_counts.empty() ? std::vector<int>{ion_count} : ion_counts;
}

ScenarioConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    check_known_keys(tree);
    const Reader r(tree);
    ScenarioConfig c;

    c.mass_u = r.get<double>("species", "mass_u").value_or(c.mass_u);
    c.charge_e = r.get<double>("species", "charge_e").value_or(c.charge_e);
    require_positive(c.mass_u, "species.mass_u");
    require_positive(c.charge_e, "species.charge_e");

    c.ion_count = r.get<int>("trap", "ion_count").value_or(c.ion_count);
    require_ion_count(c.ion_count, "trap.ion_count");
    const auto nu_x = r.get<double>("trap", "nu_x_mhz");
    if (!nu_x)
        throw ConfigError("trap.nu_x_mhz: required");
    c.nu_x_mhz = *nu_x;
    require_positive(c.nu_x_mhz, "trap.nu_x_mhz");

    c.nu_y_mhz = r.get<double>("trap", "nu_y_mhz");
    c.nu_dip_mhz = r.get<double>("trap", "nu_dip_mhz");
    c.g = r.get<double>("trap", "g");
    c.delta = r.get<double>("trap", "delta");
    const bool physical = c.nu_y_mhz || c.nu_dip_mhz;
    const bool dimensionless = c.g || c.delta;
    if (physical && dimensionless)
        throw ConfigError("trap: give either nu_y_mhz/nu_dip_mhz or g/delta, not both");
    if (c.nu_y_mhz && !c.nu_dip_mhz)
        throw ConfigError("trap.nu_dip_mhz: required together with nu_y_mhz");
    if (c.g && !c.delta)
        throw ConfigError("trap.delta: required together with g");
    if (c.nu_y_mhz)
        require_positive(*c.nu_y_mhz, "trap.nu_y_mhz");
    if (c.nu_dip_mhz && *c.nu_dip_mhz < 0.0)
        throw ConfigError("trap.nu_dip_mhz: must be >= 0");
    if (c.g && *c.g <= -1.0)
        throw ConfigError("trap.g: must be > -1");
    if (c.delta && *c.delta < 0.0)
        throw ConfigError("trap.delta: must be >= 0");

    c.t_max_us = r.get<double>("time", "t_max_us").value_or(c.t_max_us);
    c.samples = r.get<int>("time", "samples").value_or(c.samples);
    require_positive(c.t_max_us, "time.t_max_us");
    if (c.samples < 2)
        throw ConfigError("time.samples: must be >= 2");

    c.periods = r.get<double>("spectrum", "periods").value_or(c.periods);
    c.samples_per_period = r.get<int>("spectrum", "samples_per_period").value_or(c.samples_per_period);
    c.window_us = r.get<double>("spectrum", "window_us");
    c.peak_threshold = r.get<double>("spectrum", "peak_threshold").value_or(c.peak_threshold);
    c.omega_max = r.get<double>("spectrum", "omega_max").value_or(c.omega_max);
    require_positive(c.periods, "spectrum.periods");
    if (c.samples_per_period < 4)
        throw ConfigError("spectrum.samples_per_period: must be >= 4");
    if (c.window_us)
        require_positive(*c.window_us, "spectrum.window_us");
    if (c.peak_threshold < 0.0 || c.peak_threshold > 1.0)
        throw ConfigError("spectrum.peak_threshold: must lie in [0, 1]");
    require_positive(c.omega_max, "spectrum.omega_max");

    c.g_range = read_range(r, "g");
    c.delta_range = read_range(r, "delta");
    if (c.g_range && c.g_range->min <= -1.0)
        throw ConfigError("sweep.g_min: must be > -1");
    if (c.delta_range && c.delta_range->min < 0.0)
        throw ConfigError("sweep.delta_min: must be >= 0");
    if (const auto list = r.text("sweep", "ion_counts")) {
        c.ion_counts = read_ion_counts(*list);
        for (int n : c.ion_counts)
            require_ion_count(n, "sweep.ion_counts");
    }

    c.revival_threshold = r.get<double>("revivals", "threshold").value_or(c.revival_threshold);
    if (!(c.revival_threshold > 0.0 && c.revival_threshold < 1.0))
        throw ConfigError("revivals.threshold: must lie in (0, 1)");

    if (const auto path = r.text("output", "path"))
        c.out_dir = *path;
    c.format = r.text("output", "format").value_or(c.format);
    if (c.format != "csv")
        throw ConfigError("output.format: only csv is supported");
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file " + path.string());
    return parse_config(in);
}

}  // namespace ionquench::cli
