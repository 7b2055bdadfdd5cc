#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gaussavg/detail/qlu.hpp"
#include "gaussavg/engine.hpp"
#include "gaussavg/errors.hpp"
#include "gaussavg/quad_special.hpp"

using namespace gaussavg;

namespace {

double rel_err(double got, double want) {
    if (want == 0.0) return std::abs(got);
    return std::abs(got - want) / std::abs(want);
}

// Frozen oracle values (E1 decomposition evaluated in extended precision).
constexpr double kCapacityEqual1 = 1.78904208696958222302;  // n=2, d=(1,1), snr=1
constexpr double kCapacity12 = 2.19269472464638814868;      // n=2, d=(1,2), snr=1
constexpr double kK0_1 = 0.59634736232319407434;            // e * E1(1)

std::vector<double> random_distinct_spectrum(std::mt19937_64& rng, int n,
                                             double lo, double hi,
                                             double min_gap = 1e-4) {
    std::uniform_real_distribution<double> unif(lo, hi);
    std::vector<double> d;
    while (static_cast<int>(d.size()) < n) {
        d.push_back(unif(rng));
        if (min_relative_gap(d) < min_gap) d.pop_back();
    }
    return d;
}

}  // namespace

TEST_CASE("spectrum validates and reports gap diagnostics") {
    CHECK_THROWS_AS(Spectrum({}), DomainError);
    CHECK_THROWS_AS(Spectrum({1.0, -2.0}), DomainError);
    CHECK_THROWS_AS(Spectrum({0.0}), DomainError);

    const Spectrum s({2.0, 1.0, 4.0});
    CHECK(s.n() == 3);
    CHECK(s.min_rel_gap() == doctest::Approx(0.5));
    CHECK_FALSE(s.degenerate());
    CHECK(Spectrum({1.0, 1.0}).degenerate());

    const Spectrum t = s.scaled(3.0);
    CHECK(t.eigenvalues() == std::vector<double>{6.0, 3.0, 12.0});
    CHECK(t.min_rel_gap() == doctest::Approx(0.5));
}

TEST_CASE("scalar function kinds evaluate their formulas") {
    CHECK(ScalarFunction::monomial(3)(2.0) == doctest::Approx(8.0));
    CHECK(ScalarFunction::polynomial({1.0, 0.0, 2.0})(3.0) ==
          doctest::Approx(19.0));  // 1 + 2 x^2
    CHECK(ScalarFunction::capacity(2.0)(1.5) == doctest::Approx(std::log1p(3.0)));
    CHECK(ScalarFunction::mmse(2.0)(1.5) == doctest::Approx(0.25));

    CHECK_THROWS_AS(ScalarFunction::monomial(0), DomainError);
    CHECK_THROWS_AS(ScalarFunction::capacity(0.0), DomainError);
    CHECK_THROWS_AS(ScalarFunction::mmse(-1.0), DomainError);
}

TEST_CASE("f_transform closed forms and quadrature path") {
    // Monomial closed form (m+n-(k+1))! x^{m+n-(k+1)}: m=1, n=2, k=0 -> 2! x^2.
    CHECK(rel_err(f_transform(ScalarFunction::monomial(1), 2, 0, 2.0), 8.0) < 1e-13);
    // k = n-1 has weight exponent 0: plain m! x^m.
    for (int m : {1, 2, 5}) {
        const double x = 1.7;
        CHECK(rel_err(f_transform(ScalarFunction::monomial(m), 3, 2, x),
                      std::tgamma(m + 1.0) * std::pow(x, m)) < 1e-12);
    }
    // Capacity at n=1: integral of e^{-t} log(1+t x), the I_0 oracle.
    CHECK(rel_err(f_transform(ScalarFunction::capacity(1.0), 1, 0, 1.0), kK0_1) <
          1e-10);
    CHECK(rel_err(f_transform(ScalarFunction::capacity(1.0), 1, 0, 2.0),
                  log_moment_closed(0, 2.0)) < 1e-10);
    // Mmse at n=2, k=0: integral e^{-t} t x (1+tx)^{-1} dt = x K_1(x).
    CHECK(rel_err(f_transform(ScalarFunction::mmse(1.0), 2, 0, 0.8),
                  0.8 * rational_moment_closed(1, 0.8)) < 1e-10);
    // Linearity across polynomial assembly: 2x^3 + x.
    const double direct =
        f_transform(ScalarFunction::polynomial({0.0, 1.0, 0.0, 2.0}), 2, 1, 1.3);
    const double split = 2.0 * f_transform(ScalarFunction::monomial(3), 2, 1, 1.3) +
                         f_transform(ScalarFunction::monomial(1), 2, 1, 1.3);
    CHECK(rel_err(direct, split) < 1e-12);

    CHECK_THROWS_AS(f_transform(ScalarFunction::monomial(1), 2, 2, 1.0), DomainError);
    CHECK_THROWS_AS(f_transform(ScalarFunction::monomial(1), 2, 0, -1.0), DomainError);
}

TEST_CASE("determinant formula: known small averages") {
    // n=1 reduces to integral e^{-t} f(t d) dt; first moment gives d.
    CHECK(rel_err(expected_trace_f(Spectrum({3.0}), ScalarFunction::monomial(1)).value,
                  3.0) < 1e-12);
    // First-moment identity E[Tr(H*AH)] = n Tr(A).
    CHECK(rel_err(expected_trace_f(Spectrum({1.0, 2.0}), ScalarFunction::monomial(1)).value,
                  6.0) < 1e-12);
    // Second moment at d=(1,2): 2x2 closed form gives 38.
    const AverageResult r =
        expected_trace_f(Spectrum({1.0, 2.0}), ScalarFunction::monomial(2));
    CHECK(rel_err(r.value, 38.0) < 1e-12);
    CHECK(r.method == Method::Determinant);
    CHECK(r.diagnostics.min_rel_gap == doctest::Approx(0.5));
    CHECK(r.diagnostics.log_condition >= 0.0);

    CHECK_THROWS_AS(expected_trace_f(Spectrum({1.0, 1.0}), ScalarFunction::monomial(1)),
                    DegenerateSpectrum);
}

TEST_CASE("schur-sum moments: known values and the degenerate contract") {
    const AverageResult r = expected_trace_moment(Spectrum({1.0, 2.0, 3.0}), 1);
    CHECK(rel_err(r.value, 18.0) < 1e-13);
    CHECK(r.method == Method::SchurSum);
    CHECK(rel_err(expected_trace_moment(Spectrum({1.0, 2.0}), 2).value, 38.0) < 1e-13);

    CHECK_THROWS_AS(expected_trace_moment(Spectrum({1.0, 1.0}), 2), DegenerateSpectrum);
    CHECK_THROWS_AS(expected_trace_moment(Spectrum({1.0, 2.0}), 0), DomainError);

    // Routed wrapper handles the coincident case instead.
    const AverageResult routed = trace_moment(Spectrum({1.0, 1.0}), 2);
    CHECK(rel_err(routed.value, 16.0) < 1e-9);
    CHECK(routed.method == Method::PerturbedLimit);
    CHECK(routed.diagnostics.degenerate_routed);
}

TEST_CASE("monomial path agrees with the Schur sum on random spectra") {
    std::mt19937_64 rng(424242);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 6);
        const int m = 1 + static_cast<int>(rng() % 8);
        const Spectrum s(random_distinct_spectrum(rng, n, 0.1, 10.0));
        const double det_path = expected_trace_f(s, ScalarFunction::monomial(m)).value;
        const double schur_path = expected_trace_moment(s, m).value;
        CHECK(rel_err(det_path, schur_path) < 1e-9);
    }
}

TEST_CASE("first-moment identity on random spectra") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 6);
        const std::vector<double> d = random_distinct_spectrum(rng, n, 0.1, 10.0);
        double trace = 0.0;
        for (double x : d) trace += x;
        CHECK(rel_err(expected_trace_moment(Spectrum(d), 1).value, n * trace) < 1e-12);
    }
}

TEST_CASE("permutation invariance of the determinant path") {
    std::vector<double> d{0.4, 1.1, 2.9, 6.5};
    const double base =
        expected_trace_f(Spectrum(d), ScalarFunction::capacity(1.0)).value;
    std::mt19937_64 rng(5);
    for (int shuffle = 0; shuffle < 6; ++shuffle) {
        std::shuffle(d.begin(), d.end(), rng);
        CHECK(rel_err(expected_trace_f(Spectrum(d), ScalarFunction::capacity(1.0)).value,
                      base) < 1e-10);
    }
}

TEST_CASE("polynomial kind equals the sum of its monomial averages") {
    const Spectrum s({0.7, 1.9, 3.1});
    // E[Tr f] is linear in f, so f(x) = 2.5 x^3 - 4 x splits into moments.
    const double poly =
        expected_trace_f(s, ScalarFunction::polynomial({0.0, -4.0, 0.0, 2.5})).value;
    const double split = 2.5 * expected_trace_moment(s, 3).value -
                         4.0 * expected_trace_moment(s, 1).value;
    CHECK(rel_err(poly, split) < 1e-11);
}

TEST_CASE("2x2 closed-form moments") {
    CHECK(rel_err(moment_2x2_closed(1.0, 1.0, 1), 4.0) < 1e-14);
    CHECK(rel_err(moment_2x2_closed(1.0, 2.0, 2), 38.0) < 1e-13);
    CHECK(rel_err(moment_2x2_closed(1.0, 1.0, 2), 16.0) < 1e-14);
    // Continuity across the confluent switch.
    for (int m : {1, 3, 6}) {
        CHECK(rel_err(moment_2x2_closed(1.0 + 1e-7, 1.0, m),
                      moment_2x2_closed(1.0, 1.0, m)) < 1e-5);
    }
    CHECK_THROWS_AS(moment_2x2_closed(0.0, 1.0, 1), DomainError);
    CHECK_THROWS_AS(moment_2x2_closed(1.0, 1.0, 0), DomainError);
}

TEST_CASE("2x2 closed-form capacity") {
    CHECK(rel_err(capacity_2x2_closed(1.0, 1.0), kCapacityEqual1) < 1e-12);
    CHECK(rel_err(capacity_2x2_closed(1.0, 2.0), kCapacity12) < 1e-12);
    // Continuity at the confluent point.
    CHECK(rel_err(capacity_2x2_closed(1.0, 1.0 + 1e-6), capacity_2x2_closed(1.0, 1.0)) <
          1e-5);
    // Symmetric in its arguments.
    CHECK(rel_err(capacity_2x2_closed(0.3, 2.6), capacity_2x2_closed(2.6, 0.3)) < 1e-13);
    CHECK_THROWS_AS(capacity_2x2_closed(-1.0, 1.0), DomainError);
}

TEST_CASE("engine reproduces the 2x2 closed forms over a grid") {
    const std::vector<double> grid{0.1, 0.35, 1.0, 2.7, 10.0};
    for (double d1 : grid) {
        for (double d2 : grid) {
            if (rel_err(d1, d2) < 1e-6) continue;
            CHECK(rel_err(capacity(Spectrum({d1, d2}), 1.0).value,
                          capacity_2x2_closed(d1, d2)) < 1e-8);
            for (int m : {1, 2, 5}) {
                CHECK(rel_err(expected_trace_moment(Spectrum({d1, d2}), m).value,
                              moment_2x2_closed(d1, d2, m)) < 1e-10);
            }
        }
    }
}

TEST_CASE("capacity and mmse corollaries") {
    // n=1: capacity = I_0(d snr), mmse = K_0(d snr).
    CHECK(rel_err(capacity(Spectrum({1.0}), 1.0).value, kK0_1) < 1e-10);
    CHECK(rel_err(mmse(Spectrum({1.0}), 1.0).value, kK0_1) < 1e-10);
    CHECK(rel_err(capacity(Spectrum({0.5}), 3.0).value, log_moment_closed(0, 1.5)) <
          1e-10);
    CHECK(rel_err(mmse(Spectrum({2.0}), 0.35).value, rational_moment_closed(0, 0.7)) <
          1e-10);

    // Equal-eigenvalue 2x2 capacity routes through the perturbed limit.
    const AverageResult cap = capacity(Spectrum({1.0, 1.0}), 1.0);
    CHECK(rel_err(cap.value, kCapacityEqual1) < 1e-8);
    CHECK(cap.method == Method::PerturbedLimit);
    CHECK(cap.diagnostics.degenerate_routed);

    CHECK_THROWS_AS(capacity(Spectrum({1.0}), 0.0), DomainError);
    CHECK_THROWS_AS(mmse(Spectrum({1.0}), -2.0), DomainError);
}

TEST_CASE("capacity increases and mmse decreases in snr") {
    const Spectrum s({0.8, 2.2, 4.0});
    double prev_cap = 0.0;
    double prev_mmse = static_cast<double>(s.n());
    for (double snr : {0.05, 0.2, 0.8, 2.0, 8.0, 30.0, 120.0}) {
        const double c = capacity(s, snr).value;
        const double m = mmse(s, snr).value;
        CHECK(c > prev_cap);
        CHECK(m < prev_mmse);
        CHECK(m > 0.0);
        prev_cap = c;
        prev_mmse = m;
    }
    // snr -> 0: capacity -> 0, mmse -> n.
    CHECK(capacity(s, 1e-9).value == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(mmse(s, 1e-9).value == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("large snr capacity and mmse match the closed forms") {
    // snr*d far past what the shared Laguerre rule resolves (the integrand
    // pole crowds the origin), so these exercise the E1-recurrence takeover
    // at the node cap. Oracles: the two-point closed form and the n=1
    // exponential-integral values.
    const Spectrum s2({0.8, 2.2});
    for (double snr : {8.0, 30.0, 100.0, 1000.0}) {
        const AverageResult r = capacity(s2, snr);
        CHECK(rel_err(r.value, capacity_2x2_closed(0.8 * snr, 2.2 * snr)) <
              1e-10);
    }
    CHECK(rel_err(mmse(Spectrum({3.0}), 500.0).value,
                  rational_moment_closed(0, 1500.0)) < 1e-10);
    CHECK(rel_err(capacity(Spectrum({2.0}), 5000.0).value,
                  log_moment_closed(0, 10000.0)) < 1e-10);
}

TEST_CASE("degenerate regularization: exact confluent targets") {
    const AverageResult m2 =
        degenerate_regularize(Spectrum({1.0, 1.0}), ScalarFunction::monomial(2));
    CHECK(rel_err(m2.value, 16.0) < 1e-9);
    CHECK(m2.method == Method::PerturbedLimit);
    CHECK(m2.diagnostics.extrap_residual < 1e-6);

    const AverageResult cap =
        degenerate_regularize(Spectrum({1.0, 1.0}), ScalarFunction::capacity(1.0));
    CHECK(rel_err(cap.value, kCapacityEqual1) < 1e-8);

    const AverageResult m1 =
        degenerate_regularize(Spectrum({2.0, 2.0, 2.0}), ScalarFunction::monomial(1));
    CHECK(rel_err(m1.value, 18.0) < 1e-10);

    // Distinct input is rejected: the caller should use the direct path.
    CHECK_THROWS_AS(
        degenerate_regularize(Spectrum({1.0, 2.0}), ScalarFunction::monomial(1)),
        DomainError);
}

TEST_CASE("mixed cluster spectra route and agree with exact moments") {
    // (1,1,2): E[Tr(H*AH)] = n Tr(A) = 12 exactly.
    const AverageResult r = trace_moment(Spectrum({1.0, 1.0, 2.0}), 1);
    CHECK(rel_err(r.value, 12.0) < 1e-10);
    CHECK(r.method == Method::PerturbedLimit);

    // Identity spectrum of size 4, first moment: 4 * 4 = 16.
    CHECK(rel_err(trace_moment(Spectrum(std::vector<double>(4, 1.0)), 1).value, 16.0) <
          1e-10);
}

TEST_CASE("scale-wide monomial spectra keep full precision via homogeneity") {
    // 17 eigenvalues near 1e260: raw power-matrix entries leave even the
    // quad-precision exponent range. A monomial average is homogeneous, so
    // the engine divides out the geometric mean and stays on the accurate
    // path; the first moment must then match n*sum(d) to near machine.
    std::vector<double> d;
    double trace = 0.0;
    for (int j = 1; j <= 17; ++j) {
        d.push_back(static_cast<double>(j) * 1e260);
        trace += d.back();
    }
    // The raw entry bound exceeds the quad-precision window, so without the
    // homogeneity rescue this input would land on the lossy log fallback.
    double max_abs_log = 0.0;
    for (double x : d) max_abs_log = std::max(max_abs_log, std::abs(std::log(x)));
    const double raw_bound =
        17.0 * max_abs_log + std::lgamma(19.0);  // (n-1+span) terms + (n+span)!
    CHECK(raw_bound > detail::kQfloatLogLimit - 1000.0);

    const AverageResult r =
        expected_trace_f(Spectrum(d), ScalarFunction::monomial(1));
    CHECK(rel_err(r.value, 17.0 * trace) < 1e-12);
    CHECK(r.method == Method::Determinant);
}

TEST_CASE("ratio-wide spectra fall back to the signed-log determinant path") {
    // Eigenvalues spanning 1e-288 .. 1e288: no scalar factor brings that
    // spread inside the quad-precision window, so the log-represented
    // elimination must carry the determinants. Widely separated points keep
    // the elimination benign; measured ~1e-12 on this input, asserted with
    // three decades of headroom.
    std::vector<double> d;
    double trace = 0.0;
    for (int j = 1; j <= 17; ++j) {
        d.push_back(std::pow(10.0, 36.0 * (j - 9)));
        trace += d.back();
    }
    double mean_log = 0.0;
    for (double x : d) mean_log += std::log(x);
    mean_log /= 17.0;
    double spread_log = 0.0;
    for (double x : d)
        spread_log = std::max(spread_log, std::abs(std::log(x) - mean_log));
    const double centered_bound = 17.0 * spread_log + std::lgamma(19.0);
    CHECK(centered_bound > detail::kQfloatLogLimit - 1000.0);

    const double got =
        expected_trace_f(Spectrum(d), ScalarFunction::monomial(1)).value;
    CHECK(rel_err(got, 17.0 * trace) < 1e-9);
}

TEST_CASE("tight clusters next to each other refuse to regularize") {
    // Two clusters 5e-8 apart relative: any usable perturbation would
    // cross them, so the engine reports failure instead of guessing.
    const double d = 1.0;
    const Spectrum s({d, d, d * (1.0 + 5e-8), d * (1.0 + 5e-8)});
    CHECK_THROWS_AS(trace_average(s, ScalarFunction::monomial(1)), NumericalFailure);
}

TEST_CASE("quadrature diagnostics are populated for transcendental kinds") {
    const AverageResult r = capacity(Spectrum({1.0, 3.0}), 1.0);
    CHECK(r.diagnostics.quad_nodes >= 64);
    const AverageResult m = expected_trace_moment(Spectrum({1.0, 3.0}), 2);
    CHECK(m.diagnostics.quad_nodes == 0);  // closed form needs no quadrature
}
