#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gaussavg/detail/qlu.hpp"
#include "gaussavg/errors.hpp"
#include "gaussavg/partitions.hpp"
#include "gaussavg/schur.hpp"
#include "gaussavg/signed_log.hpp"

using namespace gaussavg;

namespace {

double rel_err(double got, double want) {
    if (want == 0.0) return std::abs(got);
    return std::abs(got - want) / std::abs(want);
}

// All partitions of weight <= max_weight with at most max_rows rows.
std::vector<Partition> partitions_up_to(int max_weight, int max_rows) {
    std::vector<Partition> out;
    std::vector<int> parts;
    const auto recurse = [&](auto&& self, int remaining, int cap) -> void {
        if (!parts.empty()) out.emplace_back(parts);
        if (remaining == 0 || static_cast<int>(parts.size()) == max_rows) return;
        for (int next = std::min(cap, remaining); next >= 1; --next) {
            parts.push_back(next);
            self(self, remaining - next, next);
            parts.pop_back();
        }
    };
    recurse(recurse, max_weight, max_weight);
    return out;
}

}  // namespace

TEST_CASE("signed-log value round-trips and multiplies") {
    CHECK(SignedLogValue::from_value(0.0).is_zero());
    CHECK(SignedLogValue::from_value(-3.0).sign() == -1);
    CHECK(rel_err(SignedLogValue::from_value(1234.5678).to_double(), 1234.5678) < 1e-14);
    CHECK(rel_err(SignedLogValue::from_value(-9.25e-7).to_double(), -9.25e-7) < 1e-14);

    const SignedLogValue a = SignedLogValue::from_value(2.0);
    const SignedLogValue b = SignedLogValue::from_value(-3.0);
    CHECK(rel_err((a * b).to_double(), -6.0) < 1e-14);
    CHECK(rel_err((b / a).to_double(), -1.5) < 1e-14);
    CHECK((a * SignedLogValue::zero()).is_zero());
    CHECK(rel_err((-b).to_double(), 3.0) < 1e-14);
    CHECK(rel_err(SignedLogValue::factorial(5).to_double(), 120.0) < 1e-13);
    CHECK(rel_err(SignedLogValue::one().to_double(), 1.0) == 0.0);
}

TEST_CASE("signed-log addition keeps digits under near-cancellation") {
    const SignedLogValue a = SignedLogValue::from_value(1.0 + 1e-9);
    const SignedLogValue b = SignedLogValue::from_value(-1.0);
    // 1 + 1e-9 - 1: the log1p/expm1 path must keep ~6 digits of the 1e-9.
    CHECK(rel_err((a + b).to_double(), 1e-9) < 1e-6);

    const SignedLogValue c = SignedLogValue::from_value(5.0);
    CHECK((c + (-c)).is_zero());
    CHECK(rel_err((c + c).to_double(), 10.0) < 1e-14);
    CHECK(rel_err((SignedLogValue::zero() + c).to_double(), 5.0) < 1e-14);

    // Magnitudes far beyond double range still combine.
    const SignedLogValue big = SignedLogValue::from_log(+1, 800.0);
    const SignedLogValue big2 = big + big;
    CHECK(big2.sign() == +1);
    CHECK(big2.log_abs() == doctest::Approx(800.0 + std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("min relative gap and distinctness guard") {
    CHECK(min_relative_gap({3.0, 1.0}) == doctest::Approx(2.0 / 3.0));
    CHECK(min_relative_gap({5.0}) == std::numeric_limits<double>::infinity());
    CHECK(min_relative_gap({1.0, 2.0, 2.0 + 1e-12}) < 1e-9);

    CHECK_NOTHROW(require_distinct(PointSet{1.0, 2.0, 4.0}));
    try {
        require_distinct(PointSet{1.0, 3.0, 3.0 + 1e-11});
        CHECK(false);
    } catch (const DegenerateSpectrum& e) {
        CHECK(e.index_a == 1);
        CHECK(e.index_b == 2);
        CHECK(e.rel_gap < 1e-9);
    }
}

TEST_CASE("vandermonde determinant in signed-log form") {
    CHECK(rel_err(vandermonde_logdet(PointSet{3.0, 1.0}).to_double(), 2.0) < 1e-14);
    CHECK(rel_err(vandermonde_logdet(PointSet{1.0, 2.0, 4.0}).to_double(), -6.0) < 1e-14);
    CHECK(rel_err(vandermonde_logdet(PointSet{5.0}).to_double(), 1.0) == 0.0);
}

TEST_CASE("bialternant reproduces worked Schur values") {
    // s_(2,1,1)(x1,x2,x3) = x1 x2 x3 (x1+x2+x3) -> 6 * 6 at (1,2,3).
    CHECK(rel_err(schur_bialternant(Partition{2, 1, 1}, PointSet{1.0, 2.0, 3.0}).to_double(),
                  36.0) < 1e-12);
    // s_(1) is the elementary sum.
    CHECK(rel_err(schur_bialternant(Partition{1}, PointSet{1.0, 2.0}).to_double(), 3.0) <
          1e-13);
    // Empty partition: s_() = 1.
    CHECK(rel_err(schur_bialternant(Partition{}, PointSet{1.5, 2.5}).to_double(), 1.0) <
          1e-13);
    // More nonzero parts than points: the polynomial vanishes.
    CHECK(schur_bialternant(Partition{1, 1, 1}, PointSet{1.0, 2.0}).is_zero());

    CHECK_THROWS_AS(schur_bialternant(Partition{1}, PointSet{1.0, -2.0}), DomainError);
    CHECK_THROWS_AS(schur_bialternant(Partition{1}, PointSet{2.0, 2.0}),
                    DegenerateSpectrum);
}

TEST_CASE("ssyt oracle handles coincident points and worked counts") {
    // Tableaux of shape (2,1,1) with letters 1..3: three of them.
    CHECK(schur_ssyt_oracle(Partition{2, 1, 1}, PointSet{1.0, 1.0, 1.0}) ==
          doctest::Approx(3.0));
    // s_(2,2,0) has exactly six monomials.
    CHECK(schur_ssyt_oracle(Partition{2, 2, 0}, PointSet{1.0, 1.0, 1.0}) ==
          doctest::Approx(6.0));
    CHECK(schur_ssyt_oracle(Partition{1}, PointSet{2.75}) == doctest::Approx(2.75));
    // s_(2,2) near the confluent point (1,1+e,1-e) tends to 6.
    CHECK(rel_err(schur_ssyt_oracle(Partition{2, 2}, PointSet{1.0, 1.0 + 1e-8, 1.0 - 1e-8}),
                  6.0) < 1e-7);

    CHECK_THROWS_AS(schur_ssyt_oracle(Partition{13}, PointSet{1.0}), DomainError);
    CHECK_THROWS_AS(
        schur_ssyt_oracle(Partition{1}, PointSet{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0}),
        DomainError);
}

TEST_CASE("identity dimension formula") {
    for (int n = 1; n <= 6; ++n)
        CHECK(rel_err(schur_identity_dim(Partition{1}, n).to_double(),
                      static_cast<double>(n)) < 1e-13);
    CHECK(rel_err(schur_identity_dim(Partition{2, 1, 1}, 3).to_double(), 3.0) < 1e-13);
    CHECK(rel_err(schur_identity_dim(Partition{2}, 3).to_double(), 6.0) < 1e-13);
    // n smaller than the number of rows: dimension zero.
    CHECK(schur_identity_dim(Partition{2, 1, 1}, 2).is_zero());
}

TEST_CASE("identity dimension equals ssyt count at all-ones") {
    for (const Partition& p : partitions_up_to(8, 4)) {
        for (int n = p.num_parts(); n <= 5; ++n) {
            const PointSet ones(std::vector<double>(static_cast<std::size_t>(n), 1.0));
            CHECK(rel_err(schur_identity_dim(p, n).to_double(),
                          schur_ssyt_oracle(p, ones)) < 1e-12);
        }
    }
}

TEST_CASE("bialternant equals ssyt oracle on random point sets") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> unif(0.1, 4.0);
    const std::vector<Partition> ps = partitions_up_to(8, 4);
    for (int set = 0; set < 12; ++set) {
        const int n = 2 + static_cast<int>(rng() % 3);  // 2..4 points
        std::vector<double> pts;
        while (static_cast<int>(pts.size()) < n) {
            pts.push_back(unif(rng));
            if (min_relative_gap(pts) < 1e-3) pts.pop_back();
        }
        const PointSet points(pts);
        for (const Partition& p : ps) {
            if (p.num_parts() > n) continue;
            const double want = schur_ssyt_oracle(p, points);
            const double got = schur_bialternant(p, points).to_double();
            CHECK(rel_err(got, want) < 1e-10);
        }
    }
}

TEST_CASE("bialternant is symmetric in its points") {
    const Partition p{3, 1};
    std::vector<double> pts{0.7, 1.9, 3.3, 0.2};
    const double base = schur_bialternant(p, PointSet(pts)).to_double();
    std::sort(pts.begin(), pts.end());
    do {
        CHECK(rel_err(schur_bialternant(p, PointSet(pts)).to_double(), base) < 1e-12);
    } while (std::next_permutation(pts.begin(), pts.end()));
}

TEST_CASE("bialternant is homogeneous of degree weight") {
    const Partition p{2, 2, 1};
    const PointSet pts{0.5, 1.25, 2.0};
    const double base = schur_bialternant(p, pts).to_double();
    for (double c : {0.1, 2.0, 7.5}) {
        std::vector<double> scaled = pts.values;
        for (double& x : scaled) x *= c;
        const double got = schur_bialternant(p, PointSet(scaled)).to_double();
        CHECK(rel_err(got, std::pow(c, p.weight()) * base) < 1e-12);
    }
}

TEST_CASE("trace-power Schur expansion equals the direct power sum") {
    // Tr(A^2) = s_(2) - s_(1,1) = 7 - 2 at eigenvalues (1,2).
    CHECK(rel_err(trace_power_schur(PointSet{1.0, 2.0}, 2), 5.0) < 1e-12);
    // n = 1: single term d^m.
    CHECK(rel_err(trace_power_schur(PointSet{1.7}, 5), std::pow(1.7, 5)) < 1e-12);
    // Tr(A^3) at (1,2,3) = 1 + 8 + 27 = 36.
    CHECK(rel_err(trace_power_schur(PointSet{1.0, 2.0, 3.0}, 3), 36.0) < 1e-12);

    std::mt19937_64 rng(7321);
    std::uniform_real_distribution<double> unif(0.2, 9.0);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 6);
        const int m = 1 + static_cast<int>(rng() % 8);
        std::vector<double> d;
        while (static_cast<int>(d.size()) < n) {
            d.push_back(unif(rng));
            if (min_relative_gap(d) < 1e-4) d.pop_back();
        }
        double want = 0.0;
        for (double x : d) want += std::pow(x, m);
        CHECK(rel_err(trace_power_schur(PointSet(d), m), want) < 1e-10);
    }

    CHECK_THROWS_AS(trace_power_schur(PointSet{1.0, 1.0}, 2), DegenerateSpectrum);
    CHECK_THROWS_AS(trace_power_schur(PointSet{1.0, 2.0}, 0), DomainError);
}

TEST_CASE("signed-log determinant survives huge entry ranges") {
    // [[2e200, 1], [1, 3e-200]]: det = 6 - 1 = 5, far outside double range
    // for the raw cofactor products.
    std::vector<std::vector<SignedLogValue>> m(2, std::vector<SignedLogValue>(2));
    m[0][0] = SignedLogValue::from_log(+1, 200.0 * std::log(10.0) + std::log(2.0));
    m[0][1] = SignedLogValue::one();
    m[1][0] = SignedLogValue::one();
    m[1][1] = SignedLogValue::from_log(+1, -200.0 * std::log(10.0) + std::log(3.0));
    CHECK(rel_err(detail::logdet_scaled(m).to_double(), 5.0) < 1e-12);

    // Singular matrix: exact zero.
    std::vector<std::vector<SignedLogValue>> s(2, std::vector<SignedLogValue>(2));
    s[0][0] = SignedLogValue::from_value(2.0);
    s[0][1] = SignedLogValue::from_value(4.0);
    s[1][0] = SignedLogValue::from_value(1.0);
    s[1][1] = SignedLogValue::from_value(2.0);
    CHECK(detail::logdet_scaled(s).is_zero());
}

TEST_CASE("power-matrix determinant helper agrees with the Vandermonde product") {
    const std::vector<double> pts{1.0, 2.0, 4.0};
    const std::vector<long long> exps{2, 1, 0};
    const double got = detail::det_power_matrix(pts, exps).to_double();
    CHECK(rel_err(got, -6.0) < 1e-13);

    // Exponent ranges past the qfloat window must fall back to the
    // signed-log path and still agree where both are defined.
    const std::vector<double> tiny{1e-300, 2e-300, 4e-300};
    CHECK(detail::power_matrix_log_range(tiny, {40, 20, 0}) >
          detail::power_matrix_log_range(pts, exps));
}
