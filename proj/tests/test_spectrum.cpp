#include <doctest.h>

#include <cmath>

#include "ionquench/errors.hpp"
#include "ionquench/scenario.hpp"
#include "ionquench/spectrum.hpp"

using namespace ionquench;

namespace {

constexpr double two_pi = 2.0 * constants::pi;

VisibilitySeries sampled(double T, Eigen::Index K, double (*f)(double)) {
    VisibilitySeries s;
    s.times = Eigen::VectorXd::LinSpaced(K + 1, 0.0, T);
    s.visibility = s.times.unaryExpr(f);
    s.overlap = s.visibility.cast<Complex>();
    return s;
}

double parseval_sum(const Eigen::VectorXcd& F, Eigen::Index K) {
    const Eigen::Index last = (K + 1) / 2 - 1;
    double sum = std::norm(F[0]) + 2.0 * F.segment(1, last).cwiseAbs2().sum();
    if (K % 2 == 0)
        sum += std::norm(F[K / 2]);
    return sum;
}

QuenchScenario three_ions(double nu_y_mhz) {
    TrapSpec s;
    s.ion_count = 3;
    s.ion_mass = 9.0122;
    s.nu_x = two_pi * 1e6;
    s.nu_y = two_pi * nu_y_mhz * 1e6;
    s.nu_dip = two_pi * 245e3;
    return build_scenario(s);
}

SpectrumResult quench_spectrum(const QuenchScenario& s, const SpectrumGrid& grid) {
    const VisibilitySeries series = visibility_series(s.map, grid.times(), 4);
    return label_peaks(compute_spectra(series, grid.window), s.basis_e.frequencies, two_pi / grid.window);
}

}  // namespace

TEST_CASE("constant visibility") {
    const SpectrumResult r = compute_spectra(sampled(10.0, 64, [](double) { return 1.0; }), 10.0);
    CHECK(std::abs(r.F[0] - 1.0) < 1e-14);
    CHECK(r.F.tail(r.F.size() - 1).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(r.F_log.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(r.peaks.empty());
    CHECK(r.frequencies.size() == 33);
    CHECK(r.frequencies[1] == doctest::Approx(two_pi / 10.0));
}

TEST_CASE("parseval and the time average") {
    for (Eigen::Index K : {200, 201}) {
        const double T = 37.0;
        const VisibilitySeries s = sampled(T, K, [](double t) { return 0.6 + 0.3 * std::cos(1.7 * t) * std::exp(-0.02 * t); });
        const SpectrumResult r = compute_spectra(s, T);
        Eigen::VectorXd folded = s.visibility.head(K);
        folded[0] = 0.5 * (s.visibility[0] + s.visibility[K]);
        CHECK(parseval_sum(r.F, K) == doctest::Approx(folded.squaredNorm() / K).epsilon(1e-8));

        double average = 0.0;
        for (Eigen::Index k = 0; k < K; ++k)
            average += 0.5 * (s.visibility[k] + s.visibility[k + 1]);
        average /= K;
        CHECK(std::abs(r.F[0].real() - average) < 1e-10);
    }
}

TEST_CASE("a pure second harmonic is labelled 2w1") {
    const double T = 80.0 * constants::pi;
    const SpectrumResult raw =
        compute_spectra(sampled(T, 4000, [](double t) { return 1.0 - 0.1 * (1.0 - std::cos(2.0 * t)); }), T);
    const Eigen::Vector3d modes(1.0, 2.7, 3.9);
    const SpectrumResult r = label_peaks(raw, modes, two_pi / T);
    REQUIRE(!r.peaks.empty());
    const SpectralPeak& top = dominant_peak(r);
    CHECK(top.frequency == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(top.label == "2w1");

    // The same peak with the modes listed in another order.
    const SpectrumResult shuffled = label_peaks(raw, Eigen::Vector3d(3.9, 1.0, 2.7), two_pi / T);
    CHECK(dominant_peak(shuffled).label == "2w1");
}

TEST_CASE("an incommensurate line stays unassigned") {
    const double T = 200.0;
    const SpectrumResult raw =
        compute_spectra(sampled(T, 8000, [](double t) { return 0.8 + 0.1 * std::cos(std::sqrt(2.0) * t); }), T);
    const SpectrumResult r = label_peaks(raw, Eigen::Vector2d(0.3, 0.5), two_pi / T);
    CHECK(dominant_peak(r).label == "unassigned");
    const SpectrumResult sum = label_peaks(raw, Eigen::Vector2d(0.3, std::sqrt(2.0) - 0.3), two_pi / T);
    CHECK(dominant_peak(sum).label == "w1+w2");
}

TEST_CASE("clamped samples are counted") {
    const double T = 4.0 * constants::pi;
    const SpectrumResult r = compute_spectra(sampled(T, 400, [](double t) { return std::abs(std::cos(t)); }), T);
    CHECK(r.clamped_count > 0);
    CHECK(r.F_log.array().isFinite().all());
    CHECK(compute_spectra(sampled(T, 400, [](double) { return 0.5; }), T).clamped_count == 0);
}

TEST_CASE("grid validation") {
    VisibilitySeries s = sampled(10.0, 64, [](double) { return 1.0; });
    CHECK_THROWS_AS(compute_spectra(s, 11.0), InvalidInput);
    s.times[5] += 0.01;
    CHECK_THROWS_AS(compute_spectra(s, 10.0), InvalidInput);
    CHECK_THROWS_AS(compute_spectra(sampled(1.0, 1, [](double) { return 1.0; }), 1.0), InvalidInput);
    CHECK_THROWS_AS(dominant_peak(SpectrumResult{}), DomainError);
}

TEST_CASE("smooth sizes") {
    CHECK(next_smooth_size(7) == 8);
    CHECK(spectrum_grid(1.0, 1.0).intervals == 16);
    CHECK(next_smooth_size(97) == 100);
    CHECK(next_smooth_size(121) == 125);
    CHECK(next_smooth_size(180000) == 180000);
    const SpectrumGrid grid = spectrum_grid(100.0, 3.0, 32);
    CHECK(grid.intervals >= 32 * 100 * 3 / two_pi);
    CHECK(grid.times().size() == grid.intervals + 1);
    CHECK(grid.times()[grid.intervals] == grid.window);
}

TEST_CASE("spectra of the three quench regimes") {
    SUBCASE("linear to linear is dominated by the doubled soft mode") {
        const QuenchScenario s = three_ions(1.565);
        CHECK(dominant_peak(quench_spectrum(s, default_spectrum_grid(s.map))).label == "2w1");
    }
    SUBCASE("across the transition the soft mode itself dominates") {
        const QuenchScenario s = three_ions(1.545);
        const SpectrumResult r = quench_spectrum(s, default_spectrum_grid(s.map));
        CHECK(dominant_peak(r).label == "w1");
        bool has_sum = false;
        for (const SpectralPeak& p : r.peaks)
            has_sum = has_sum || p.label.find('+') != std::string::npos;
        CHECK(has_sum);
    }
    SUBCASE("zigzag to zigzag") {
        const QuenchScenario s = three_ions(1.470);
        CHECK(dominant_peak(quench_spectrum(s, default_spectrum_grid(s.map))).label == "w1");
    }
}

TEST_CASE("doubling the window moves the dominant peak by at most one bin") {
    const QuenchScenario s = three_ions(1.470);
    const double w1 = s.lowest_excited_frequency();
    const double fastest = s.map.omega_e.maxCoeff();
    const SpectrumGrid shorter = spectrum_grid(100.0 * two_pi / w1, fastest);
    const SpectrumGrid longer = spectrum_grid(200.0 * two_pi / w1, fastest);
    const double a = dominant_peak(quench_spectrum(s, shorter)).frequency;
    const double b = dominant_peak(quench_spectrum(s, longer)).frequency;
    CHECK(std::abs(a - b) <= two_pi / shorter.window + 1e-12);
}

TEST_CASE("spectrum map ridge follows the soft zigzag mode") {
    const double hbar = reduced_hbar(9.0122, 1.0, two_pi * 1e6);
    const Eigen::Vector3d g(-0.1, -0.06, 0.0);
    const QuenchScenario deep = build_scenario_at(3, -0.1, 0.025, hbar);
    const SpectrumGrid grid = spectrum_grid(100.0 * two_pi / deep.lowest_excited_frequency(), deep.map.omega_e.maxCoeff());
    const SpectrumMap map = spectrum_map(3, 0.025, g, grid, hbar, 2);
    CHECK(map.frequencies.size() == grid.intervals / 2 + 1);
    for (Eigen::Index i : {0, 1}) {
        Eigen::Index at = 0;
        map.magnitude.row(i).tail(map.frequencies.size() - 1).maxCoeff(&at);
        CHECK(std::abs(map.frequencies[at + 1] - map.lowest_frequency[i]) <= two_pi / grid.window);
    }
    REQUIRE(map.errors.size() == 1);
    CHECK(map.errors[0].g_index == 2);
    CHECK(std::isnan(map.magnitude(2, 0)));
}
