#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ionquench/errors.hpp"
#include "ionquench/units.hpp"

namespace ionquench::cli {

/// A config value is missing, malformed or inconsistent. The message names the field.
class ConfigError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

/// Inclusive, evenly spaced axis; steps == 1 means the single value `min`.
struct Range {
    double min = 0.0;
    double max = 0.0;
    int steps = 1;

    Eigen::VectorXd values() const;
};

/// Scenario description read from an INI-style file. Frequencies are
/// ordinary frequencies in MHz, nu = 2 pi x value x 1e6 rad/s.
struct ScenarioConfig {
    // [species]
    double mass_u = 9.0122;
    double charge_e = 1.0;

    // [trap]
    int ion_count = 3;
    double nu_x_mhz = 0.0;
    std::optional<double> nu_y_mhz;
    std::optional<double> nu_dip_mhz;
    std::optional<double> g;
    std::optional<double> delta;

    // [time]
    double t_max_us = 10.0;
    int samples = 2001;

    // [spectrum]
    double periods = 400.0;
    int samples_per_period = 32;
    std::optional<double> window_us;
    double peak_threshold = 1e-2;
    double omega_max = 2.0;

    // [sweep]
    std::optional<Range> g_range;
    std::optional<Range> delta_range;
    std::vector<int> ion_counts;

    // [revivals]
    double revival_threshold = 0.05;

    // [output]
    std::filesystem::path out_dir = ".";
    std::string format = "csv";

    double nu_x() const;
    double hbar_tilde() const;
    double time_unit() const;
    bool has_physical_point() const { return nu_y_mhz.has_value(); }
    bool has_point() const { return nu_y_mhz || g; }

    /// Physical trap for the configured point at ion count n; a (g, delta)
    /// point is converted through the critical frequency of n ions.
    TrapSpec trap_spec(int n) const;

    /// delta for n ions from [trap], converting nu_dip when given physically.
    double resolved_delta(int n) const;

    std::vector<int> sweep_ion_counts() const;
};

ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace ionquench::cli
