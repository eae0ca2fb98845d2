#include "ionquench/cli/commands.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ionquench/cli/output.hpp"
#include "ionquench/crystal.hpp"
#include "ionquench/detail/parallel.hpp"
#include "ionquench/scenario.hpp"
#include "ionquench/spectrum.hpp"
#include "ionquench/visibility.hpp"

namespace ionquench::cli {

namespace {

constexpr double two_pi = 2.0 * constants::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();
constexpr Eigen::Index max_spectrum_intervals = Eigen::Index{1} << 24;

constexpr std::array<std::pair<Command, std::string_view>, 7> names{{
    {Command::visibility, "visibility"},
    {Command::curvature, "curvature"},
    {Command::phase_diagram, "phase-diagram"},
    {Command::spectrum, "spectrum"},
    {Command::spectrum_map, "spectrum-map"},
    {Command::revivals, "revivals"},
    {Command::modes, "modes"},
}};

std::string fmt(double x) { return format_number(x); }

std::string list(const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i)
            out += ", ";
        out += fmt(v[i]);
    }
    return out;
}

struct PointFailure {
    std::string where;
    std::string message;
};

class Run {
public:
    Run(Command command, const ScenarioConfig& config, const RunOptions& options)
        : command_(command), c_(config), o_(options) {
        std::filesystem::create_directories(o_.out_dir);
        describe_common();
    }

    CsvWriter csv(const std::string& name, std::initializer_list<std::string_view> header) {
        const std::filesystem::path path = o_.out_dir / name;
        summary_.files.push_back(path);
        return CsvWriter(path, header);
    }

    Manifest& manifest() { return manifest_; }
    const ScenarioConfig& config() const { return c_; }
    int threads() const { return o_.threads; }

    double to_dimensionless(double t_us) const { return t_us * 1e-6 * c_.nu_x(); }
    double to_us(double t) const { return t * c_.time_unit() * 1e6; }
    double to_mhz(double omega) const { return omega * c_.nu_x_mhz; }

    void fail(std::string where, std::string message) { failures_.push_back({std::move(where), std::move(message)}); }

    QuenchScenario point_scenario() {
        const int n = c_.ion_count;
        const TrapSpec spec = c_.trap_spec(n);
        DimensionlessParams p = resolve_dimensionless(spec);
        if (!c_.has_physical_point()) {
            p.g = *c_.g;
            p.delta = *c_.delta;
        }
        QuenchScenario s = c_.has_physical_point() ? build_scenario(spec)
                                                   : build_scenario_at(n, p.g, p.delta, c_.hbar_tilde());
        manifest_.section("point");
        manifest_.set("ion_count", n);
        manifest_.set("nu_y_mhz", spec.nu_y / two_pi * 1e-6);
        manifest_.set("nu_dip_mhz", spec.nu_dip / two_pi * 1e-6);
        manifest_.set("nu_c_mhz", c_.nu_x_mhz * std::sqrt(p.alpha_c));
        manifest_.set("alpha", s.model.alpha);
        manifest_.set("alpha_c", p.alpha_c);
        manifest_.set("alpha_dip", s.model.alpha_dip);
        manifest_.set("g", p.g);
        manifest_.set("delta", p.delta);
        manifest_.set("structure_g", std::string(to_string(s.equilibrium_g.structure)));
        manifest_.set("structure_e", std::string(to_string(s.equilibrium_e.structure)));
        manifest_.set("omega_e", list(s.basis_e.frequencies));
        manifest_.set("omega_g", list(s.basis_g.frequencies));
        manifest_.set("ground_state_overlap", s.map.G0);
        return s;
    }

    Eigen::VectorXd g_axis() const {
        if (!c_.g_range)
            throw ConfigError(std::string("sweep.g_min: required for ") + std::string(to_string(command_)));
        return c_.g_range->values();
    }

    Eigen::VectorXd delta_axis() const {
        if (c_.delta_range)
            return c_.delta_range->values();
        return Eigen::VectorXd::Constant(1, c_.resolved_delta(c_.ion_count));
    }

    void describe_time_grid() {
        manifest_.section("time");
        manifest_.set("t_max_us", c_.t_max_us);
        manifest_.set("t_max", to_dimensionless(c_.t_max_us));
        manifest_.set("samples", c_.samples);
    }

    Eigen::VectorXd time_grid_us() const { return Eigen::VectorXd::LinSpaced(c_.samples, 0.0, c_.t_max_us); }

    RunSummary finish() {
        manifest_.section("errors");
        manifest_.set("count", static_cast<int>(failures_.size()));
        for (std::size_t i = 0; i < failures_.size(); ++i)
            manifest_.set("point_" + std::to_string(i), failures_[i].where + ": " + failures_[i].message);

        manifest_.section("outputs");
        for (std::size_t i = 0; i < summary_.files.size(); ++i)
            manifest_.set("file_" + std::to_string(i), summary_.files[i].filename().string());

        manifest_.write(o_.out_dir / "manifest.txt");
        write_timestamp();
        summary_.point_errors = failures_.size();
        return summary_;
    }

private:
    void describe_common() {
        manifest_.section("run");
        manifest_.set("command", std::string(to_string(command_)));
        manifest_.set("format", c_.format);
        manifest_.set("threads", o_.threads);
        manifest_.set("seeds", "none (no random sampling)");

        manifest_.section("species");
        manifest_.set("mass_u", c_.mass_u);
        manifest_.set("charge_e", c_.charge_e);

        manifest_.section("units");
        manifest_.set("nu_x_mhz", c_.nu_x_mhz);
        manifest_.set("nu_x_rad_per_s", c_.nu_x());
        manifest_.set("length_unit_m", characteristic_length(c_.mass_u, c_.charge_e, c_.nu_x()));
        manifest_.set("time_unit_s", c_.time_unit());
        manifest_.set("hbar_tilde", c_.hbar_tilde());
        manifest_.set("dimensionless_time_per_us", to_dimensionless(1.0));
        manifest_.set("mhz_per_dimensionless_frequency", c_.nu_x_mhz);

        manifest_.section("tolerances");
        const MinimizerOptions minimizer;
        manifest_.set("equilibrium_gradient", minimizer.gradient_tolerance);
        manifest_.set("critical_aspect_ratio_bisection", 1e-13);
        manifest_.set("phase_boundary_bisection", 1e-12);
        manifest_.set("overlap_method", "schur");
        manifest_.set("revival_threshold", c_.revival_threshold);
        manifest_.set("log_clamp", log_clamp);
        manifest_.set("peak_threshold", c_.peak_threshold);
    }

    void write_timestamp() const {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm utc{};
        gmtime_r(&now, &utc);
        std::ofstream out(o_.out_dir / "timestamp.txt", std::ios::binary | std::ios::trunc);
        out << "created_utc = " << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ") << '\n';
    }

    Command command_;
    const ScenarioConfig& c_;
    const RunOptions& o_;
    Manifest manifest_;
    RunSummary summary_;
    std::vector<PointFailure> failures_;
};

void run_visibility(Run& run) {
    const QuenchScenario s = run.point_scenario();
    run.describe_time_grid();
    const Eigen::VectorXd t_us = run.time_grid_us();
    const Eigen::VectorXd t = t_us.unaryExpr([&](double x) { return run.to_dimensionless(x); });
    const VisibilitySeries series = visibility_series(s.map, t, run.threads());

    CsvWriter out = run.csv("visibility.csv", {"t_us", "visibility", "overlap_re", "overlap_im"});
    for (Eigen::Index k = 0; k < t.size(); ++k)
        out.row({fmt(t_us[k]), fmt(series.visibility[k]), fmt(series.overlap[k].real()), fmt(series.overlap[k].imag())});
    out.close();

    Manifest& m = run.manifest();
    m.section("results");
    const double w1 = s.lowest_excited_frequency();
    m.set("min_visibility", series.visibility.minCoeff());
    m.set("lowest_excited_omega", w1);
    m.set("lowest_excited_period", two_pi / w1);
    m.set("lowest_excited_period_us", run.to_us(two_pi / w1));
    const std::vector<double> revivals = revival_times(series, run.config().revival_threshold);
    m.set("revival_count", static_cast<int>(revivals.size()));
    if (!revivals.empty()) {
        m.set("first_revival", revivals.front());
        m.set("first_revival_us", run.to_us(revivals.front()));
    }
    if (revivals.size() >= 2) {
        m.set("revival_spacing", revival_spacing(revivals));
        m.set("revival_spacing_us", run.to_us(revival_spacing(revivals)));
    }
}

void run_modes(Run& run) {
    const QuenchScenario s = run.point_scenario();
    const ScenarioConfig& c = run.config();
    const double length_um = characteristic_length(c.mass_u, c.charge_e, c.nu_x()) * 1e6;

    CsvWriter modes = run.csv("modes.csv", {"state", "mode", "omega", "nu_mhz"});
    CsvWriter ions = run.csv("equilibrium.csv", {"state", "ion", "x", "y", "x_um", "y_um"});
    const int n = s.model.ion_count;
    for (const auto* basis : {&s.basis_g, &s.basis_e}) {
        const std::string state(to_string(basis->state));
        for (Eigen::Index l = 0; l < basis->frequencies.size(); ++l)
            modes.row({state, std::to_string(l + 1), fmt(basis->frequencies[l]), fmt(run.to_mhz(basis->frequencies[l]))});
        const Eigen::VectorXd& r = basis->equilibrium.positions;
        for (int i = 0; i < n; ++i)
            ions.row({state, std::to_string(i + 1), fmt(r[i]), fmt(r[n + i]), fmt(r[i] * length_um),
                      fmt(r[n + i] * length_um)});
    }
    modes.close();
    ions.close();
}

void run_spectrum(Run& run) {
    const QuenchScenario s = run.point_scenario();
    const ScenarioConfig& c = run.config();
    const double w1 = s.lowest_excited_frequency();
    const double window = c.window_us ? run.to_dimensionless(*c.window_us) : c.periods * two_pi / w1;
    const SpectrumGrid grid = spectrum_grid(window, s.map.omega_e.maxCoeff(), c.samples_per_period);
    if (grid.intervals > max_spectrum_intervals)
        throw ConfigError("spectrum: window needs " + std::to_string(grid.intervals) +
                          " samples; lower spectrum.periods or set spectrum.window_us");

    const VisibilitySeries series = visibility_series(s.map, grid.times(), run.threads());
    const SpectrumResult r =
        label_peaks(compute_spectra(series, grid.window, c.peak_threshold), s.basis_e.frequencies, two_pi / grid.window);

    CsvWriter out = run.csv("spectrum.csv", {"omega", "nu_mhz", "abs_F", "abs_F_log", "F_re", "F_im", "F_log_re", "F_log_im"});
    for (Eigen::Index n = 0; n < r.frequencies.size() && r.frequencies[n] <= c.omega_max; ++n)
        out.row({fmt(r.frequencies[n]), fmt(run.to_mhz(r.frequencies[n])), fmt(std::abs(r.F[n])), fmt(std::abs(r.F_log[n])),
                 fmt(r.F[n].real()), fmt(r.F[n].imag()), fmt(r.F_log[n].real()), fmt(r.F_log[n].imag())});
    out.close();

    CsvWriter peaks = run.csv("peaks.csv", {"omega", "nu_mhz", "magnitude", "label"});
    for (const SpectralPeak& p : r.peaks)
        peaks.row({fmt(p.frequency), fmt(run.to_mhz(p.frequency)), fmt(p.magnitude), p.label});
    peaks.close();

    Manifest& m = run.manifest();
    m.section("spectrum");
    m.set("window", grid.window);
    m.set("window_us", run.to_us(grid.window));
    m.set("intervals", static_cast<int>(grid.intervals));
    m.set("bin_width", two_pi / grid.window);
    m.set("bin_width_mhz", run.to_mhz(two_pi / grid.window));
    m.set("label_tolerance", two_pi / grid.window);
    m.set("omega_max", c.omega_max);
    m.set("clamped_samples", r.clamped_count);
    if (!r.peaks.empty()) {
        const SpectralPeak& top = dominant_peak(r);
        m.set("dominant_peak_omega", top.frequency);
        m.set("dominant_peak_mhz", run.to_mhz(top.frequency));
        m.set("dominant_peak_label", top.label);
    }
}

void run_spectrum_map(Run& run) {
    const ScenarioConfig& c = run.config();
    const int n = c.ion_count;
    const double delta = c.resolved_delta(n);
    const Eigen::VectorXd g = run.g_axis();

    // One shared grid: the slowest soft mode sets the window, the fastest mode the step.
    Eigen::VectorXd lowest = Eigen::VectorXd::Constant(g.size(), nan);
    Eigen::VectorXd fastest = Eigen::VectorXd::Constant(g.size(), nan);
    detail::parallel_for(static_cast<std::size_t>(g.size()), run.threads(), [&](std::size_t k) {
        const auto i = static_cast<Eigen::Index>(k);
        try {
            const QuenchScenario s = build_scenario_at(n, g[i], delta, c.hbar_tilde());
            lowest[i] = s.lowest_excited_frequency();
            fastest[i] = s.map.omega_e.maxCoeff();
        } catch (const Error&) {
        }
    });
    double w_min = std::numeric_limits<double>::infinity(), w_max = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (std::isnan(lowest[i]))
            continue;
        w_min = std::min(w_min, lowest[i]);
        w_max = std::max(w_max, fastest[i]);
    }
    if (w_max == 0.0)
        throw NumericError("spectrum-map: no g point produced a stable quench");

    const double window = c.window_us ? run.to_dimensionless(*c.window_us) : c.periods * two_pi / w_min;
    const SpectrumGrid grid = spectrum_grid(window, w_max, c.samples_per_period);
    if (grid.intervals > max_spectrum_intervals)
        throw ConfigError("spectrum: window needs " + std::to_string(grid.intervals) +
                          " samples; lower spectrum.periods or set spectrum.window_us");

    const SpectrumMap map = spectrum_map(n, delta, g, grid, c.hbar_tilde(), run.threads());
    for (const auto& e : map.errors)
        run.fail("g=" + fmt(g[e.g_index]) + " delta=" + fmt(delta), e.message);

    CsvWriter out = run.csv("spectrum_map.csv", {"g", "omega", "nu_mhz", "abs_F_log"});
    for (Eigen::Index i = 0; i < g.size(); ++i)
        for (Eigen::Index k = 0; k < map.frequencies.size() && map.frequencies[k] <= c.omega_max; ++k)
            out.row({fmt(g[i]), fmt(map.frequencies[k]), fmt(run.to_mhz(map.frequencies[k])), fmt(map.magnitude(i, k))});
    out.close();

    CsvWriter modes = run.csv("spectrum_map_modes.csv", {"g", "omega_1e", "nu_1e_mhz"});
    for (Eigen::Index i = 0; i < g.size(); ++i)
        modes.row({fmt(g[i]), fmt(map.lowest_frequency[i]), fmt(run.to_mhz(map.lowest_frequency[i]))});
    modes.close();

    Manifest& m = run.manifest();
    m.section("sweep");
    m.set("ion_count", n);
    m.set("delta", delta);
    m.set("g", list(g));
    m.section("spectrum");
    m.set("window", grid.window);
    m.set("window_us", run.to_us(grid.window));
    m.set("intervals", static_cast<int>(grid.intervals));
    m.set("bin_width", two_pi / grid.window);
    m.set("bin_width_mhz", run.to_mhz(two_pi / grid.window));
    m.set("omega_max", c.omega_max);
}

void run_curvature(Run& run) {
    const ScenarioConfig& c = run.config();
    const int n = c.ion_count;
    const Eigen::VectorXd g = run.g_axis();
    const Eigen::VectorXd delta = run.delta_axis();
    const CurvatureSurface surface = curvature_surface(n, delta, g, c.hbar_tilde(), run.threads());
    for (const auto& e : surface.errors)
        run.fail("g=" + fmt(g[e.g_index]) + " delta=" + fmt(delta[e.delta_index]), e.message);

    const double per_us2 = std::pow(c.nu_x() * 1e-6, 2);
    CsvWriter out = run.csv("curvature.csv", {"g", "delta", "eta", "eta_per_us2"});
    for (Eigen::Index i = 0; i < delta.size(); ++i)
        for (Eigen::Index j = 0; j < g.size(); ++j)
            out.row({fmt(g[j]), fmt(delta[i]), fmt(surface.eta(i, j)), fmt(surface.eta(i, j) * per_us2)});
    out.close();

    Manifest& m = run.manifest();
    m.section("sweep");
    m.set("ion_count", n);
    m.set("g", list(g));
    m.set("delta", list(delta));
    m.set("eta_units", "nu_x^2; eta_per_us2 = eta * (nu_x * 1e-6 s)^2");
}

void run_phase_diagram(Run& run) {
    const ScenarioConfig& c = run.config();
    const int n = c.ion_count;
    const Eigen::VectorXd g = run.g_axis();
    const Eigen::VectorXd delta = run.delta_axis();
    const auto cols = static_cast<std::size_t>(g.size());
    const std::size_t points = static_cast<std::size_t>(delta.size()) * cols;

    std::vector<std::array<std::string, 2>> structures(points);
    std::vector<std::string> errors(points);
    detail::parallel_for(points, run.threads(), [&](std::size_t k) {
        const auto i = static_cast<Eigen::Index>(k / cols), j = static_cast<Eigen::Index>(k % cols);
        try {
            const PhasePoint p = phase_point(n, g[j], delta[i]);
            structures[k] = {std::string(to_string(p.structure_g)), std::string(to_string(p.structure_e))};
        } catch (const Error& e) {
            structures[k] = {"nan", "nan"};
            errors[k] = e.what();
        }
    });

    std::vector<double> boundary(static_cast<std::size_t>(delta.size()), nan);
    std::vector<std::string> boundary_errors(boundary.size());
    detail::parallel_for(boundary.size(), run.threads(), [&](std::size_t i) {
        try {
            boundary[i] = phase_boundary(n, delta[static_cast<Eigen::Index>(i)]);
        } catch (const Error& e) {
            boundary_errors[i] = e.what();
        }
    });

    CsvWriter out = run.csv("phase_diagram.csv", {"g", "delta", "structure_g", "structure_e"});
    for (std::size_t k = 0; k < points; ++k) {
        const auto i = static_cast<Eigen::Index>(k / cols), j = static_cast<Eigen::Index>(k % cols);
        out.row({fmt(g[j]), fmt(delta[i]), structures[k][0], structures[k][1]});
        if (!errors[k].empty())
            run.fail("g=" + fmt(g[j]) + " delta=" + fmt(delta[i]), errors[k]);
    }
    out.close();

    CsvWriter edge = run.csv("phase_boundary.csv", {"delta", "g_c"});
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        edge.row({fmt(delta[static_cast<Eigen::Index>(i)]), fmt(boundary[i])});
        if (!boundary_errors[i].empty())
            run.fail("boundary delta=" + fmt(delta[static_cast<Eigen::Index>(i)]), boundary_errors[i]);
    }
    edge.close();

    Manifest& m = run.manifest();
    m.section("sweep");
    m.set("ion_count", n);
    m.set("alpha_c", critical_aspect_ratio(n));
    m.set("nu_c_mhz", c.nu_x_mhz * std::sqrt(critical_aspect_ratio(n)));
    m.set("g", list(g));
    m.set("delta", list(delta));
}

void run_revivals(Run& run) {
    const ScenarioConfig& c = run.config();
    const Eigen::VectorXd g = run.g_axis();
    const std::vector<int> counts = c.sweep_ion_counts();
    run.describe_time_grid();
    const Eigen::VectorXd t = run.time_grid_us().unaryExpr([&](double x) { return run.to_dimensionless(x); });

    Manifest& m = run.manifest();
    m.section("sweep");
    m.set("g", list(g));
    std::vector<double> deltas;
    for (int n : counts) {
        const double alpha_c = critical_aspect_ratio(n);
        deltas.push_back(c.resolved_delta(n));
        const std::string tag = "n" + std::to_string(n) + "_";
        m.set(tag + "delta", deltas.back());
        m.set(tag + "alpha_c", alpha_c);
        m.set(tag + "nu_c_mhz", c.nu_x_mhz * std::sqrt(alpha_c));
        m.set(tag + "phase_boundary_g", phase_boundary(n, deltas.back()));
    }
    m.set("peak_rule", "first local maximum above the threshold after the visibility first drops below it");

    const auto cols = static_cast<std::size_t>(g.size());
    const std::size_t points = counts.size() * cols;
    std::vector<double> peak(points, nan);
    std::vector<std::string> errors(points);
    detail::parallel_for(points, run.threads(), [&](std::size_t k) {
        const std::size_t a = k / cols;
        const auto j = static_cast<Eigen::Index>(k % cols);
        try {
            const QuenchScenario s = build_scenario_at(counts[a], g[j], deltas[a], c.hbar_tilde());
            if (const auto first = first_revival_time(visibility_series(s.map, t), c.revival_threshold))
                peak[k] = *first;
        } catch (const Error& e) {
            errors[k] = e.what();
        }
    });

    int missing = 0;
    CsvWriter out = run.csv("revivals.csv", {"N", "g", "t_first_peak_us"});
    for (std::size_t k = 0; k < points; ++k) {
        const std::size_t a = k / cols;
        const auto j = static_cast<Eigen::Index>(k % cols);
        out.row({std::to_string(counts[a]), fmt(g[j]), fmt(run.to_us(peak[k]))});
        if (!errors[k].empty())
            run.fail("N=" + std::to_string(counts[a]) + " g=" + fmt(g[j]), errors[k]);
        else if (std::isnan(peak[k]))
            ++missing;
    }
    out.close();
    m.section("results");
    m.set("points_without_revival", missing);
    m.set("t_first_peak_dimensionless", "t_first_peak_us * dimensionless_time_per_us");
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
    for (const auto& [command, text] : names)
        if (text == name)
            return command;
    return std::nullopt;
}

std::string_view to_string(Command command) {
    for (const auto& [c, text] : names)
        if (c == command)
            return text;
    return "unknown";
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> all = [] {
        std::vector<std::string> v;
        for (const auto& [c, text] : names)
            v.emplace_back(text);
        return v;
    }();
    return all;
}

RunSummary run(Command command, const ScenarioConfig& config, const RunOptions& options) {
    Run r(command, config, options);
    switch (command) {
    case Command::visibility: run_visibility(r); break;
    case Command::curvature: run_curvature(r); break;
    case Command::phase_diagram: run_phase_diagram(r); break;
    case Command::spectrum: run_spectrum(r); break;
    case Command::spectrum_map: run_spectrum_map(r); break;
    case Command::revivals: run_revivals(r); break;
    case Command::modes: run_modes(r); break;
    }
    return r.finish();
}

}  // namespace ionquench::cli
