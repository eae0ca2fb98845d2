#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "ionquench/visibility.hpp"

namespace ionquench {

struct SpectralPeak {
    Eigen::Index bin = 0;
    double frequency = 0.0;
    double magnitude = 0.0;
    std::string label = "unassigned";
};

/// Finite-window transforms F(w_n) = (1/T) int_0^T V e^{-i w_n t} dt and the
/// same for ln V, on w_n = 2 pi n / T for n = 0 .. K/2 (V is real, so the
/// negative frequencies are the conjugates).
struct SpectrumResult {
    double window = 0.0;
    Eigen::Index intervals = 0;  // K, number of quadrature intervals
    Eigen::VectorXd frequencies;
    Eigen::VectorXcd F;
    Eigen::VectorXcd F_log;
    std::vector<SpectralPeak> peaks;  // local maxima of |F_log|, ascending in frequency
    int clamped_count = 0;
};

inline constexpr double log_clamp = 1e-12;
inline constexpr double default_peak_threshold = 1e-2;  // relative to the largest |F_log(w_n)|, n >= 1

/// Trapezoid rule on a uniform grid covering [0, window_T]. Throws InvalidInput
/// if the grid is not uniform or does not span the window.
SpectrumResult compute_spectra(const VisibilitySeries& series, double window_T,
                               double peak_threshold = default_peak_threshold);

/// Assigns each peak to the nearest of w_j, 2 w_j, w_j + w_k within tol.
/// Labels use 1-based indices into the ascending mode frequencies: "w1", "2w1", "w1+w3".
SpectrumResult label_peaks(SpectrumResult spectrum, const Eigen::Ref<const Eigen::VectorXd>& mode_freqs, double tol);

/// Peak with the largest magnitude; throws DomainError when there are none.
const SpectralPeak& dominant_peak(const SpectrumResult& spectrum);

/// Uniform sampling plan for one window.
struct SpectrumGrid {
    double window = 0.0;
    Eigen::Index intervals = 0;

    Eigen::VectorXd times() const;
};

/// 400 periods of the lowest e-mode, 32 samples per period of the fastest one,
/// with the interval count rounded up to a 2^a 3^b 5^c size.
SpectrumGrid default_spectrum_grid(const QuenchMap& map);
SpectrumGrid spectrum_grid(double window_T, double fastest_frequency, int samples_per_period = 32);

Eigen::Index next_smooth_size(Eigen::Index n);

struct SpectrumMap {
    Eigen::VectorXd g_grid;
    Eigen::VectorXd frequencies;
    Eigen::MatrixXd magnitude;  // |F_log|, rows: g, cols: frequency; NaN where a point failed
    Eigen::VectorXd lowest_frequency;  // omega_1^e per g
    struct PointError {
        Eigen::Index g_index;
        std::string message;
    };
    std::vector<PointError> errors;
};

SpectrumMap spectrum_map(int ion_count, double delta, const Eigen::Ref<const Eigen::VectorXd>& g_grid,
                         const SpectrumGrid& grid, double hbar_tilde, int threads = 1);

}  // namespace ionquench
