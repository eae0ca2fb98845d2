#include "ionquench/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <tuple>

#include <unsupported/Eigen/FFT>

#include "ionquench/detail/parallel.hpp"
#include "ionquench/errors.hpp"
#include "ionquench/scenario.hpp"
#include "ionquench/units.hpp"

namespace ionquench {

namespace {

constexpr double two_pi = 2.0 * constants::pi;

void require_uniform(const Eigen::VectorXd& t, double window_T) {
    if (!(window_T > 0.0) || !std::isfinite(window_T))
        throw InvalidInput("compute_spectra: window must be positive");
    if (t.size() < 3)
        throw InvalidInput("compute_spectra: need at least three samples");
    const double step = window_T / static_cast<double>(t.size() - 1);
    const double tol = 1e-9 * window_T;
    for (Eigen::Index k = 0; k < t.size(); ++k) {
        if (std::abs(t[k] - step * static_cast<double>(k)) > tol)
            throw InvalidInput("compute_spectra: time grid is not uniform on [0, T]");
    }
}

// (1/T) int_0^T f e^{-i w_n t} dt by the trapezoid rule, which on a full
// period collapses to a DFT of f with the end points folded together.
Eigen::VectorXcd trapezoid_transform(const Eigen::VectorXd& f) {
    const Eigen::Index K = f.size() - 1;
    std::vector<double> folded(f.data(), f.data() + K);
    folded[0] = 0.5 * (f[0] + f[K]);
    std::vector<std::complex<double>> out;
    Eigen::FFT<double> fft;
    fft.fwd(out, folded);
    Eigen::VectorXcd half(K / 2 + 1);
    for (Eigen::Index n = 0; n < half.size(); ++n)
        half[n] = out[static_cast<std::size_t>(n)] / static_cast<double>(K);
    return half;
}

std::vector<SpectralPeak> find_peaks(const Eigen::VectorXcd& F, const Eigen::VectorXd& freqs, double threshold) {
    const Eigen::VectorXd mag = F.cwiseAbs();
    std::vector<SpectralPeak> peaks;
    if (mag.size() < 3)
        return peaks;
    const double floor = threshold * mag.tail(mag.size() - 1).maxCoeff();
    for (Eigen::Index n = 1; n + 1 < mag.size(); ++n) {
        if (mag[n] > mag[n - 1] && mag[n] > mag[n + 1] && mag[n] >= floor && mag[n] > 0.0)
            peaks.push_back({n, freqs[n], mag[n], "unassigned"});
    }
    return peaks;
}

}  // namespace

SpectrumResult compute_spectra(const VisibilitySeries& series, double window_T, double peak_threshold) {
    require_uniform(series.times, window_T);
    if (series.visibility.size() != series.times.size())
        throw InvalidInput("compute_spectra: series lengths differ");

    SpectrumResult r;
    r.window = window_T;
    r.intervals = series.times.size() - 1;

    Eigen::VectorXd log_v(series.visibility.size());
    for (Eigen::Index k = 0; k < log_v.size(); ++k) {
        double v = series.visibility[k];
        if (!(v >= log_clamp)) {
            v = log_clamp;
            ++r.clamped_count;
        }
        log_v[k] = std::log(v);
    }

    r.F = trapezoid_transform(series.visibility);
    r.F_log = trapezoid_transform(log_v);
    r.frequencies.resize(r.F.size());
    for (Eigen::Index n = 0; n < r.frequencies.size(); ++n)
        r.frequencies[n] = two_pi * static_cast<double>(n) / window_T;
    r.peaks = find_peaks(r.F_log, r.frequencies, peak_threshold);
    return r;
}

SpectrumResult label_peaks(SpectrumResult spectrum, const Eigen::Ref<const Eigen::VectorXd>& mode_freqs, double tol) {
    std::vector<double> w(mode_freqs.data(), mode_freqs.data() + mode_freqs.size());
    std::sort(w.begin(), w.end());

    struct Candidate {
        double frequency;
        int order;  // 1: w_j, 2: 2 w_j, 3: w_j + w_k
        std::size_t j, k;
    };
    std::vector<Candidate> candidates;
    for (std::size_t j = 0; j < w.size(); ++j) {
        candidates.push_back({w[j], 1, j, j});
        candidates.push_back({2.0 * w[j], 2, j, j});
        for (std::size_t k = j + 1; k < w.size(); ++k)
            candidates.push_back({w[j] + w[k], 3, j, k});
    }

    for (SpectralPeak& p : spectrum.peaks) {
        const Candidate* best = nullptr;
        double best_distance = std::numeric_limits<double>::infinity();
        for (const Candidate& c : candidates) {
            const double d = std::abs(c.frequency - p.frequency);
            if (d > tol)
                continue;
            if (!best || std::tie(d, c.order, c.j, c.k) < std::tie(best_distance, best->order, best->j, best->k)) {
                best = &c;
                best_distance = d;
            }
        }
        if (!best) {
            p.label = "unassigned";
            continue;
        }
        const std::string j = std::to_string(best->j + 1);
        switch (best->order) {
        case 1: p.label = "w" + j; break;
        case 2: p.label = "2w" + j; break;
        default: p.label = "w" + j + "+w" + std::to_string(best->k + 1); break;
        }
    }
    return spectrum;
}

const SpectralPeak& dominant_peak(const SpectrumResult& spectrum) {
    if (spectrum.peaks.empty())
        throw DomainError("dominant_peak: spectrum has no peaks");
    return *std::max_element(spectrum.peaks.begin(), spectrum.peaks.end(),
                             [](const SpectralPeak& a, const SpectralPeak& b) { return a.magnitude < b.magnitude; });
}

Eigen::VectorXd SpectrumGrid::times() const {
    Eigen::VectorXd t(intervals + 1);
    for (Eigen::Index k = 0; k <= intervals; ++k)
        t[k] = window * static_cast<double>(k) / static_cast<double>(intervals);
    return t;
}

Eigen::Index next_smooth_size(Eigen::Index n) {
    for (Eigen::Index m = std::max<Eigen::Index>(n, 1);; ++m) {
        Eigen::Index r = m;
        for (Eigen::Index p : {2, 3, 5})
            while (r % p == 0)
                r /= p;
        if (r == 1)
            return m;
    }
}

SpectrumGrid spectrum_grid(double window_T, double fastest_frequency, int samples_per_period) {
    if (!(window_T > 0.0) || !(fastest_frequency > 0.0) || samples_per_period < 2)
        throw InvalidInput("spectrum_grid: window, frequency and sampling must be positive");
    const double periods = window_T * fastest_frequency / two_pi;
    const auto raw = static_cast<Eigen::Index>(std::ceil(periods * samples_per_period));
    return {window_T, next_smooth_size(std::max<Eigen::Index>(raw, 16))};
}

SpectrumGrid default_spectrum_grid(const QuenchMap& map) {
    const double w1 = map.omega_e.minCoeff();
    return spectrum_grid(400.0 * two_pi / w1, map.omega_e.maxCoeff());
}

SpectrumMap spectrum_map(int ion_count, double delta, const Eigen::Ref<const Eigen::VectorXd>& g_grid,
                         const SpectrumGrid& grid, double hbar_tilde, int threads) {
    SpectrumMap out;
    out.g_grid = g_grid;
    const Eigen::VectorXd times = grid.times();
    const Eigen::Index bins = grid.intervals / 2 + 1;
    out.frequencies.resize(bins);
    for (Eigen::Index n = 0; n < bins; ++n)
        out.frequencies[n] = two_pi * static_cast<double>(n) / grid.window;
    out.magnitude = Eigen::MatrixXd::Constant(g_grid.size(), bins, std::numeric_limits<double>::quiet_NaN());
    out.lowest_frequency = Eigen::VectorXd::Constant(g_grid.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> messages(static_cast<std::size_t>(g_grid.size()));

    detail::parallel_for(static_cast<std::size_t>(g_grid.size()), threads, [&](std::size_t k) {
        const auto i = static_cast<Eigen::Index>(k);
        try {
            const QuenchScenario s = build_scenario_at(ion_count, g_grid[i], delta, hbar_tilde);
            const SpectrumResult r = compute_spectra(visibility_series(s.map, times), grid.window);
            out.magnitude.row(i) = r.F_log.cwiseAbs().transpose();
            out.lowest_frequency[i] = s.lowest_excited_frequency();
        } catch (const Error& e) {
            messages[k] = e.what();
        }
    });
    for (std::size_t k = 0; k < messages.size(); ++k) {
        if (!messages[k].empty())
            out.errors.push_back({static_cast<Eigen::Index>(k), messages[k]});
    }
    return out;
}

}  // namespace ionquench
