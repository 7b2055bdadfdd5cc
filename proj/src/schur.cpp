#include "gaussavg/schur.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gaussavg/detail/qlu.hpp"
#include "gaussavg/errors.hpp"

namespace gaussavg {

double min_relative_gap(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size());
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double denom = std::max(std::abs(values[i]), std::abs(values[j]));
            const double gap = denom > 0.0 ? std::abs(values[i] - values[j]) / denom : 0.0;
            best = std::min(best, gap);
        }
    }
    return best;
}

void require_distinct(const PointSet& pts, double rel_tol) {
    const int n = pts.size();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double denom =
                std::max(std::abs(pts.values[i]), std::abs(pts.values[j]));
            const double gap =
                denom > 0.0 ? std::abs(pts.values[i] - pts.values[j]) / denom : 0.0;
            if (gap < rel_tol) throw DegenerateSpectrum(i, j, gap);
        }
    }
}

SignedLogValue vandermonde_logdet(const PointSet& pts) {
    SignedLogValue det = SignedLogValue::one();
    const int n = pts.size();
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k)
            det *= SignedLogValue::from_value(pts.values[j] - pts.values[k]);
    return det;
}

namespace detail {

SignedLogValue logdet_scaled(const std::vector<std::vector<SignedLogValue>>& m) {
    const int n = static_cast<int>(m.size());
    if (n == 0) return SignedLogValue::one();

    // Row scales keep the working matrix in [-1, 1]; the factored-out
    // magnitudes re-enter the result as a log-space sum.
    double log_scale_sum = 0.0;
    std::vector<std::vector<long double>> a(n, std::vector<long double>(n, 0.0L));
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(m[i].size()) != n)
            throw DomainError("logdet_scaled: matrix is not square");
        double row_max = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j)
            if (!m[i][j].is_zero()) row_max = std::max(row_max, m[i][j].log_abs());
        if (row_max == -std::numeric_limits<double>::infinity())
            return SignedLogValue::zero();
        log_scale_sum += row_max;
        for (int j = 0; j < n; ++j) {
            if (m[i][j].is_zero()) continue;
            a[i][j] = static_cast<long double>(m[i][j].sign()) *
                      std::exp(static_cast<long double>(m[i][j].log_abs() - row_max));
        }
    }

    int sign = 1;
    long double log_pivot_sum = 0.0L;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0L) return SignedLogValue::zero();
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            sign = -sign;
        }
        const long double p = a[col][col];
        if (p < 0.0L) sign = -sign;
        log_pivot_sum += std::log(std::abs(p));
        for (int r = col + 1; r < n; ++r) {
            const long double factor = a[r][col] / p;
            if (factor == 0.0L) continue;
            for (int c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
        }
    }
    return SignedLogValue::from_log(
        sign, log_scale_sum + static_cast<double>(log_pivot_sum));
}

}  // namespace detail

SignedLogValue schur_bialternant(const Partition& p, const PointSet& pts) {
    const int n = pts.size();
    if (n == 0) return p.empty() ? SignedLogValue::one() : SignedLogValue::zero();
    if (p.num_parts() > n) return SignedLogValue::zero();
    for (int j = 0; j < n; ++j)
        if (pts.values[j] <= 0.0)
            throw DomainError("schur_bialternant: points must be positive, got " +
                              std::to_string(pts.values[j]));
    require_distinct(pts);

    std::vector<long long> exps(n);
    for (int i = 0; i < n; ++i) exps[i] = p.part(i) + n - 1 - i;
    return detail::det_power_matrix(pts.values, exps) / vandermonde_logdet(pts);
}

namespace {

// Row-major recursive fill. Rows weakly increase, columns strictly increase.
double ssyt_sum(const Partition& p, const std::vector<double>& x, int n,
                std::vector<std::vector<int>>& entry, int row, int col,
                double product) {
    if (row == p.num_parts()) return product;
    if (col == p.part(row)) return ssyt_sum(p, x, n, entry, row + 1, 0, product);
    int lo = 1;
    if (col > 0) lo = std::max(lo, entry[row][col - 1]);
    if (row > 0) lo = std::max(lo, entry[row - 1][col] + 1);
    double total = 0.0;
    for (int t = lo; t <= n; ++t) {
        entry[row][col] = t;
        total += ssyt_sum(p, x, n, entry, row, col + 1, product * x[t - 1]);
    }
    return total;
}

}  // namespace

double schur_ssyt_oracle(const Partition& p, const PointSet& pts) {
    const int n = pts.size();
    if (p.weight() > 12)
        throw DomainError("schur_ssyt_oracle: weight " +
                          std::to_string(p.weight()) + " exceeds bound 12");
    if (n > 6)
        throw DomainError("schur_ssyt_oracle: " + std::to_string(n) +
                          " points exceed bound 6");
    if (p.empty()) return 1.0;
    if (p.num_parts() > n) return 0.0;
    std::vector<std::vector<int>> entry;
    entry.reserve(p.num_parts());
    for (int r = 0; r < p.num_parts(); ++r)
        entry.emplace_back(p.part(r), 0);
    return ssyt_sum(p, pts.values, n, entry, 0, 0, 1.0);
}

SignedLogValue schur_identity_dim(const Partition& p, int n) {
    if (n < 0) throw DomainError("schur_identity_dim: n must be >= 0");
    if (p.num_parts() > n) return SignedLogValue::zero();
    if (n == 0) return SignedLogValue::one();

    // Every factor (lambda_i - lambda_j + j - i)/(j - i) is positive and
    // the full product is an integer dimension. Exact 128-bit accumulation
    // with gcd reduction; log-space fallback if the running values overflow.
    const auto gcd128 = [](unsigned __int128 a, unsigned __int128 b) {
        while (b != 0) {
            const unsigned __int128 r = a % b;
            a = b;
            b = r;
        }
        return a;
    };
    unsigned __int128 num = 1, den = 1;
    bool exact = true;
    const unsigned __int128 kMax = ~static_cast<unsigned __int128>(0) / 64;
    for (int i = 0; i < n && exact; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const unsigned __int128 top =
                static_cast<unsigned __int128>(p.part(i) - p.part(j) + j - i);
            const unsigned __int128 bot = static_cast<unsigned __int128>(j - i);
            if (num > kMax / top || den > kMax / bot) {
                exact = false;
                break;
            }
            num *= top;
            den *= bot;
            const unsigned __int128 g = gcd128(num, den);
            num /= g;
            den /= g;
        }
    }
    if (exact) {
        return SignedLogValue::from_log(
            1, static_cast<double>(std::log(static_cast<long double>(num)) -
                                   std::log(static_cast<long double>(den))));
    }
    double log_sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            log_sum += std::log(static_cast<double>(p.part(i) - p.part(j) + j - i)) -
                       std::log(static_cast<double>(j - i));
    return SignedLogValue::from_log(1, log_sum);
}

double trace_power_schur(const PointSet& pts, int m) {
    if (m < 1) throw DomainError("trace_power_schur: m must be >= 1");
    const int n = pts.size();
    if (n == 0) throw DomainError("trace_power_schur: empty point set");
    SignedLogValue total = SignedLogValue::zero();
    const int kmax = std::min(n, m) - 1;
    for (int k = 0; k <= kmax; ++k) {
        SignedLogValue term = schur_bialternant(Partition::hook_shape(m, k), pts);
        if (k % 2 == 1) term = -term;
        total += term;
    }
    return total.to_double();
}

}  // namespace gaussavg
