#include "gaussavg/quad_special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>

#include "gaussavg/errors.hpp"

namespace gaussavg {

namespace {

// Implicit-shift QL on a symmetric tridiagonal matrix, rotating a single
// accompanying vector z instead of the full eigenvector matrix. On return
// diag holds the eigenvalues and z_i the first eigenvector components.
void ql_implicit_shift(std::vector<long double>& diag,
                       std::vector<long double>& sub,
                       std::vector<long double>& z) {
    const int n = static_cast<int>(diag.size());
    const long double eps = std::numeric_limits<long double>::epsilon();
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m = l;
        for (;;) {
            for (m = l; m < n - 1; ++m) {
                const long double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
                if (std::abs(sub[m]) <= eps * dd) break;
            }
            if (m == l) break;
            if (iter++ == 30)
                throw NumericalFailure(
                    "tridiagonal QL failed to converge in 30 iterations");
            long double g = (diag[l + 1] - diag[l]) / (2.0L * sub[l]);
            long double r = std::hypot(g, 1.0L);
            g = diag[m] - diag[l] + sub[l] / (g + std::copysign(r, g));
            long double s = 1.0L, c = 1.0L, p = 0.0L;
            bool underflow = false;
            for (int i = m - 1; i >= l; --i) {
                long double f = s * sub[i];
                const long double b = c * sub[i];
                r = std::hypot(f, g);
                sub[i + 1] = r;
                if (r == 0.0L) {
                    diag[i + 1] -= p;
                    sub[m] = 0.0L;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0L * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if (underflow) continue;
            diag[l] -= p;
            sub[l] = g;
            sub[m] = 0.0L;
        }
    }
}

}  // namespace

double QuadratureRule::integrate(const std::function<double(double)>& g) const {
    long double sum = 0.0L;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        sum += static_cast<long double>(weights[i]) * g(nodes[i]);
    return static_cast<double>(sum);
}

namespace {

QuadratureRule build_gauss_laguerre(double alpha, int n_nodes) {
    const int n = n_nodes;
    const long double a = alpha;
    std::vector<long double> diag(n), sub(n, 0.0L), z(n, 0.0L);
    for (int j = 0; j < n; ++j) diag[j] = 2.0L * j + a + 1.0L;
    for (int j = 1; j < n; ++j) sub[j - 1] = std::sqrt(j * (j + a));
    z[0] = 1.0L;
    ql_implicit_shift(diag, sub, z);

    const long double mu0 = std::tgamma(a + 1.0L);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return diag[i] < diag[j]; });

    QuadratureRule rule;
    rule.alpha = alpha;
    rule.nodes.reserve(n);
    rule.weights.reserve(n);
    for (int i : order) {
        rule.nodes.push_back(static_cast<double>(diag[i]));
        rule.weights.push_back(static_cast<double>(mu0 * z[i] * z[i]));
    }
    return rule;
}

}  // namespace

QuadratureRule gauss_laguerre(double alpha, int n_nodes) {
    if (n_nodes < 1)
        throw DomainError("gauss_laguerre: n_nodes must be >= 1, got " +
                          std::to_string(n_nodes));
    if (alpha < 0.0)
        throw DomainError("gauss_laguerre: alpha must be >= 0, got " +
                          std::to_string(alpha));

    // Rules are pure functions of (alpha, n_nodes) and the engine requests
    // the same handful over and over; memoize behind a mutex.
    static std::mutex cache_mutex;
    static std::map<std::pair<std::uint64_t, int>, QuadratureRule> cache;
    std::uint64_t alpha_bits = 0;
    std::memcpy(&alpha_bits, &alpha, sizeof alpha);
    const std::pair<std::uint64_t, int> key{alpha_bits, n_nodes};
    {
        const std::lock_guard<std::mutex> lock(cache_mutex);
        const auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    QuadratureRule rule = build_gauss_laguerre(alpha, n_nodes);
    {
        const std::lock_guard<std::mutex> lock(cache_mutex);
        cache.emplace(key, rule);
    }
    return rule;
}

AdaptiveQuadResult integrate_exp_weight_adaptive(
    const std::function<double(double)>& g, double alpha, double rel_tol,
    int start_nodes) {
    constexpr int kMaxNodes = 1024;
    double prev = std::numeric_limits<double>::quiet_NaN();
    double est = 0.0;
    for (int n = start_nodes; n <= kMaxNodes; n *= 2) {
        est = gauss_laguerre(alpha, n).integrate(g);
        if (!std::isnan(prev)) {
            const double scale = std::max(std::abs(est), std::abs(prev));
            if (std::abs(est - prev) <= rel_tol * scale + 1e-300)
                return {est, n};
        }
        prev = est;
    }
    throw ToleranceNotMet(prev, est, rel_tol);
}

double integrate_exp_weight(const std::function<double(double)>& g,
                            double alpha, double rel_tol) {
    return integrate_exp_weight_adaptive(g, alpha, rel_tol).value;
}

namespace {

constexpr long double kEulerGamma = 0.57721566490153286061L;

// Convergent series E1(x) = -gamma - log x + sum_{k>=1} (-1)^{k+1} x^k/(k k!),
// good for x <= 1 where no cancellation occurs.
long double e1_series(long double x) {
    long double sum = -kEulerGamma - std::log(x);
    long double power_over_fact = 1.0L;
    for (int k = 1; k <= 80; ++k) {
        power_over_fact *= x / k;
        const long double term =
            (k % 2 == 1 ? power_over_fact : -power_over_fact) / k;
        sum += term;
        if (std::abs(term) <
            std::numeric_limits<long double>::epsilon() * std::abs(sum))
            break;
    }
    return sum;
}

// Modified Lentz evaluation of the continued fraction
//   e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- 9/(x+7- ...)))),
// which converges quickly for x > 1 and never over/underflows.
long double e1_scaled_cf(long double x) {
    constexpr long double kTiny = 1e-300L;
    const long double eps = std::numeric_limits<long double>::epsilon();
    long double b = x + 1.0L;
    long double c = 1.0L / kTiny;
    long double d = 1.0L / b;
    long double h = d;
    for (int i = 1; i <= 300; ++i) {
        const long double a = -static_cast<long double>(i) * i;
        b += 2.0L;
        d = a * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + a / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0L / d;
        const long double del = d * c;
        h *= del;
        if (std::abs(del - 1.0L) < eps) return h;
    }
    throw NumericalFailure("E1 continued fraction did not converge");
}

}  // namespace

double exp_integral_e1(double x) {
    if (x <= 0.0)
        throw DomainError("exp_integral_e1: x must be > 0, got " +
                          std::to_string(x));
    if (x <= 1.0) return static_cast<double>(e1_series(x));
    return static_cast<double>(e1_scaled_cf(x) * std::exp(-static_cast<long double>(x)));
}

double exp_integral_e1_scaled(double x) {
    if (x <= 0.0)
        throw DomainError("exp_integral_e1_scaled: x must be > 0, got " +
                          std::to_string(x));
    if (x <= 1.0)
        return static_cast<double>(std::exp(static_cast<long double>(x)) *
                                   e1_series(x));
    return static_cast<double>(e1_scaled_cf(x));
}

namespace {

void require_pd(int p, double d, const char* who) {
    if (p < 0)
        throw DomainError(std::string(who) + ": p must be >= 0, got " +
                          std::to_string(p));
    if (d <= 0.0)
        throw DomainError(std::string(who) + ": d must be > 0, got " +
                          std::to_string(d));
}

}  // namespace

double rational_moment_closed(int p, double d) {
    require_pd(p, d, "rational_moment_closed");
    const long double k0 = exp_integral_e1_scaled(1.0 / d) / d;
    if (p == 0) return static_cast<double>(k0);
    if (d >= 0.5) {
        long double k = k0;
        long double fact = 1.0L;
        for (int j = 1; j <= p; ++j) {
            k = (fact - k) / d;
            fact *= j;
        }
        return static_cast<double>(k);
    }
    return integrate_exp_weight([d](double t) { return 1.0 / (1.0 + t * d); },
                                static_cast<double>(p), 1e-12);
}

double log_moment_closed(int p, double d) {
    require_pd(p, d, "log_moment_closed");
    const long double i0 = exp_integral_e1_scaled(1.0 / d);
    if (p == 0) return static_cast<double>(i0);
    if (d >= 0.5) {
        long double k = i0 / d;
        long double i = i0;
        long double fact = 1.0L;
        for (int j = 1; j <= p; ++j) {
            k = (fact - k) / d;
            i = j * i + d * k;
            fact *= j;
        }
        return static_cast<double>(i);
    }
    return integrate_exp_weight([d](double t) { return std::log1p(t * d); },
                                static_cast<double>(p), 1e-12);
}

}  // namespace gaussavg
