#include "gaussavg/engine.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gaussavg/detail/qlu.hpp"
#include "gaussavg/errors.hpp"
#include "gaussavg/quad_special.hpp"

namespace gaussavg {

using detail::qfloat;

Spectrum::Spectrum(std::vector<double> eigenvalues)
    : eigs_(std::move(eigenvalues)) {
    if (eigs_.empty())
        throw DomainError("Spectrum: needs at least one eigenvalue");
    for (double d : eigs_)
        if (!std::isfinite(d) || d <= 0.0)
            throw DomainError(
                "Spectrum: eigenvalues must be positive and finite, got " +
                std::to_string(d));
    min_rel_gap_ = min_relative_gap(eigs_);
}

Spectrum Spectrum::scaled(double factor) const {
    if (!std::isfinite(factor) || factor <= 0.0)
        throw DomainError("Spectrum::scaled: factor must be positive, got " +
                          std::to_string(factor));
    std::vector<double> v = eigs_;
    for (double& d : v) d *= factor;
    return Spectrum(std::move(v));
}

ScalarFunction ScalarFunction::monomial(int m) {
    if (m < 1)
        throw DomainError("ScalarFunction::monomial: m must be >= 1, got " +
                          std::to_string(m));
    return ScalarFunction(Kind::Monomial, m, 0.0, {});
}

ScalarFunction ScalarFunction::polynomial(std::vector<double> coefficients) {
    while (!coefficients.empty() && coefficients.back() == 0.0)
        coefficients.pop_back();
    for (double c : coefficients)
        if (!std::isfinite(c))
            throw DomainError(
                "ScalarFunction::polynomial: coefficients must be finite");
    return ScalarFunction(Kind::Polynomial, 0, 0.0, std::move(coefficients));
}

ScalarFunction ScalarFunction::capacity(double snr) {
    if (!std::isfinite(snr) || snr <= 0.0)
        throw DomainError("ScalarFunction::capacity: snr must be positive, got " +
                          std::to_string(snr));
    return ScalarFunction(Kind::Capacity, 0, snr, {});
}

ScalarFunction ScalarFunction::mmse(double snr) {
    if (!std::isfinite(snr) || snr <= 0.0)
        throw DomainError("ScalarFunction::mmse: snr must be positive, got " +
                          std::to_string(snr));
    return ScalarFunction(Kind::Mmse, 0, snr, {});
}

double ScalarFunction::operator()(double x) const {
    switch (kind_) {
        case Kind::Monomial:
            return std::pow(x, degree_);
        case Kind::Polynomial: {
            double acc = 0.0;
            for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
                acc = acc * x + *it;
            return acc;
        }
        case Kind::Capacity:
            return std::log1p(snr_ * x);
        case Kind::Mmse:
            return 1.0 / (1.0 + snr_ * x);
    }
    return 0.0;
}

std::string method_name(Method m) {
    switch (m) {
        case Method::Determinant: return "Determinant";
        case Method::SchurSum: return "SchurSum";
        case Method::ClosedForm2x2: return "ClosedForm2x2";
        case Method::PerturbedLimit: return "PerturbedLimit";
    }
    return "Unknown";
}

namespace {

using Kind = ScalarFunction::Kind;

qfloat qfactorial(int a) {
    qfloat r = 1;
    for (int j = 2; j <= a; ++j) r *= j;
    return r;
}

// (alpha+1)(alpha+2)...(alpha+m) = (alpha+m)!/alpha!
qfloat qrising(int alpha, int m) {
    qfloat r = 1;
    for (int j = alpha + 1; j <= alpha + m; ++j) r *= j;
    return r;
}

int polynomial_span(const ScalarFunction& f) {
    switch (f.kind()) {
        case Kind::Monomial: return f.degree();
        case Kind::Polynomial:
            return f.coefficients().empty()
                       ? 0
                       : static_cast<int>(f.coefficients().size()) - 1;
        default: return 0;
    }
}

constexpr qfloat kQEulerGamma = 0.5772156649015328606065120900824024Q;

// e^s E1(s) in quad precision. The alternating series below s = 8 loses
// about s/ln(10) digits to cancellation (3.5 of 34 at the crossover); the
// modified Lentz continued fraction converges in under ~60 terms above it.
qfloat e1_scaled_q(qfloat s) {
    if (s <= 8) {
        qfloat sum = -kQEulerGamma - logq(s);
        qfloat power_over_fact = 1;
        for (int k = 1; k <= 200; ++k) {
            power_over_fact *= s / k;
            const qfloat term =
                (k % 2 == 1 ? power_over_fact : -power_over_fact) / k;
            sum += term;
            if (fabsq(term) < 1e-36Q * fabsq(sum)) break;
        }
        return expq(s) * sum;
    }
    constexpr qfloat tiny = 1e-4000Q;
    qfloat b = s + 1;
    qfloat c = 1 / tiny;
    qfloat d = 1 / b;
    qfloat h = d;
    for (int i = 1; i <= 2000; ++i) {
        const qfloat a = -static_cast<qfloat>(i) * i;
        b += 2;
        d = a * d + b;
        if (fabsq(d) < tiny) d = tiny;
        c = b + a / c;
        if (fabsq(c) < tiny) c = tiny;
        d = 1 / d;
        const qfloat del = d * c;
        h *= del;
        if (fabsq(del - 1) < 2e-34Q) return h;
    }
    throw NumericalFailure("exp-integral continued fraction did not converge");
}

// integral e^{-t} t^alpha log(1+tu) dt (capacity) or the same with
// 1/(1+tu) (mmse), by the recurrences K_p = ((p-1)! - K_{p-1})/u and
// I_p = p I_{p-1} + u K_p, seeded with I_0 = e^{1/u} E1(1/u), K_0 = I_0/u.
// Each step divides the accumulated error by u, so the caller must keep
// alpha * log10(1/u) well below the 34 quad digits.
qfloat closed_exp_moment(bool want_log, int alpha, qfloat u) {
    const qfloat i0 = e1_scaled_q(1 / u);
    qfloat k = i0 / u;
    qfloat i = i0;
    qfloat fact = 1;
    for (int j = 1; j <= alpha; ++j) {
        k = (fact - k) / u;
        i = static_cast<qfloat>(j) * i + u * k;
        fact *= j;
    }
    return want_log ? i : k;
}

// The replacement row {f_k(d_j)/alpha!} with alpha = n-(k+1), all points
// in one call so every entry shares one quadrature rule: the rule's
// truncation error is then a smooth function of the point and cancels in
// the determinant the way a smooth perturbation of f would, instead of
// acting as noise amplified by near-confluent columns.
struct FRow {
    std::vector<qfloat> over_afact;
    int nodes = 0;
};

FRow f_row_over_afact(const ScalarFunction& f, int alpha,
                      const std::vector<double>& xs, const EvalOptions& opt) {
    const int npts = static_cast<int>(xs.size());
    FRow row;
    row.over_afact.assign(npts, 0);

    if (f.kind() == Kind::Monomial || f.kind() == Kind::Polynomial) {
        std::vector<double> coeffs = f.coefficients();
        if (f.kind() == Kind::Monomial) {
            coeffs.assign(static_cast<std::size_t>(f.degree()) + 1, 0.0);
            coeffs.back() = 1.0;
        }
        for (int j = 0; j < npts; ++j) {
            qfloat acc = 0;
            for (int deg = 0; deg < static_cast<int>(coeffs.size()); ++deg) {
                if (coeffs[deg] == 0.0) continue;
                acc += static_cast<qfloat>(coeffs[deg]) * qrising(alpha, deg) *
                       detail::qpow_int(xs[j], deg + alpha);
            }
            row.over_afact[j] = acc;
        }
        return row;
    }

    const bool is_capacity = f.kind() == Kind::Capacity;
    const qfloat snr = f.snr();
    const qfloat afact = qfactorial(alpha);
    std::vector<qfloat> prev(npts, 0), cur(npts, 0);
    bool have_prev = false;
    for (int n_nodes = opt.quad_start_nodes; n_nodes <= 1024; n_nodes *= 2) {
        const QuadratureRule rule =
            gauss_laguerre(static_cast<double>(alpha), n_nodes);
        for (int j = 0; j < npts; ++j) {
            qfloat acc = 0;
            for (int i = 0; i < n_nodes; ++i) {
                const qfloat u = snr * static_cast<qfloat>(rule.nodes[i]) *
                                 static_cast<qfloat>(xs[j]);
                const qfloat g = is_capacity ? log1pq(u) : 1 / (1 + u);
                acc += static_cast<qfloat>(rule.weights[i]) * g;
            }
            cur[j] = acc;
        }
        if (have_prev) {
            bool converged = true;
            for (int j = 0; j < npts; ++j) {
                const double diff =
                    static_cast<double>(detail::qabs(cur[j] - prev[j]));
                const double scale = static_cast<double>(detail::qabs(cur[j]));
                if (diff > opt.quad_rel_tol * scale + 1e-300) {
                    converged = false;
                    break;
                }
            }
            if (converged) {
                row.nodes = n_nodes;
                for (int j = 0; j < npts; ++j)
                    row.over_afact[j] =
                        detail::qpow_int(xs[j], alpha) * cur[j] / afact;
                return row;
            }
        }
        prev = cur;
        have_prev = true;
    }

    // The ladder exhausts only when some snr*x is large: the integrand's
    // pole at t = -1/(snr x) then crowds the origin beyond what any
    // affordable rule resolves. There the E1 recurrences are stable and
    // take over. Entries with small snr*x, where the recurrence would lose
    // alpha*log10(1/(snr x)) digits, are exactly the ones the capped rule
    // has already integrated to machine accuracy, so those keep it.
    const double min_arg = std::pow(10.0, -18.0 / std::max(alpha, 1));
    for (int j = 0; j < npts; ++j) {
        const qfloat u = snr * static_cast<qfloat>(xs[j]);
        if (static_cast<double>(u) >= min_arg)
            cur[j] = closed_exp_moment(is_capacity, alpha, u);
    }
    row.nodes = 1024;
    for (int j = 0; j < npts; ++j)
        row.over_afact[j] = detail::qpow_int(xs[j], alpha) * cur[j] / afact;
    return row;
}

// Same row in signed-log form, for spectra whose powers leave the
// __float128 range. Trades the quad-precision conditioning for range.
struct LogFRow {
    std::vector<SignedLogValue> over_afact;
    int nodes = 0;
};

LogFRow f_row_log(const ScalarFunction& f, int alpha,
                  const std::vector<double>& xs, const EvalOptions& opt) {
    const int npts = static_cast<int>(xs.size());
    LogFRow row;
    row.over_afact.assign(npts, SignedLogValue::zero());
    const double lg_afact = static_cast<double>(std::lgamma(
        static_cast<long double>(alpha) + 1.0L));

    if (f.kind() == Kind::Monomial || f.kind() == Kind::Polynomial) {
        std::vector<double> coeffs = f.coefficients();
        if (f.kind() == Kind::Monomial) {
            coeffs.assign(static_cast<std::size_t>(f.degree()) + 1, 0.0);
            coeffs.back() = 1.0;
        }
        for (int j = 0; j < npts; ++j) {
            SignedLogValue acc = SignedLogValue::zero();
            const double lx = std::log(xs[j]);
            for (int deg = 0; deg < static_cast<int>(coeffs.size()); ++deg) {
                if (coeffs[deg] == 0.0) continue;
                const double lg = static_cast<double>(std::lgamma(
                    static_cast<long double>(deg + alpha) + 1.0L));
                acc += SignedLogValue::from_value(coeffs[deg]) *
                       SignedLogValue::from_log(1, lg - lg_afact +
                                                       (deg + alpha) * lx);
            }
            row.over_afact[j] = acc;
        }
        return row;
    }

    const double snr = f.snr();
    const bool is_capacity = f.kind() == Kind::Capacity;
    int nodes = 0;
    for (int j = 0; j < npts; ++j) {
        const double x = xs[j];
        const auto g = [&](double t) {
            return is_capacity ? std::log1p(snr * t * x)
                               : 1.0 / (1.0 + snr * t * x);
        };
        const AdaptiveQuadResult q = integrate_exp_weight_adaptive(
            g, static_cast<double>(alpha), opt.quad_rel_tol,
            opt.quad_start_nodes);
        nodes = std::max(nodes, q.nodes_used);
        row.over_afact[j] =
            SignedLogValue::from_value(q.value) *
            SignedLogValue::from_log(1, alpha * std::log(x) - lg_afact);
    }
    row.nodes = nodes;
    return row;
}

struct KTermSum {
    SignedLogValue total = SignedLogValue::zero();
    double max_term_log = -std::numeric_limits<double>::infinity();
    int quad_nodes = 0;

    void add(SignedLogValue term) {
        if (!term.is_zero()) max_term_log = std::max(max_term_log, term.log_abs());
        total += term;
    }

    double log_condition() const {
        if (total.is_zero() ||
            max_term_log == -std::numeric_limits<double>::infinity())
            return 0.0;
        return std::max(0.0, max_term_log - total.log_abs());
    }
};

double finite_or_throw(const SignedLogValue& v, const char* what) {
    const double x = v.to_double();
    if (!std::isfinite(x))
        throw NumericalFailure(std::string(what) +
                               ": result exceeds double range");
    return x;
}

}  // namespace

double f_transform(const ScalarFunction& f, int n, int k, double x,
                   const EvalOptions& options) {
    if (n < 1)
        throw DomainError("f_transform: n must be >= 1, got " +
                          std::to_string(n));
    if (k < 0 || k > n - 1)
        throw DomainError("f_transform: k must lie in [0, n-1], got " +
                          std::to_string(k));
    if (!std::isfinite(x) || x <= 0.0)
        throw DomainError("f_transform: x must be positive, got " +
                          std::to_string(x));
    const int alpha = n - k - 1;
    const FRow row = f_row_over_afact(f, alpha, {x}, options);
    return static_cast<double>(row.over_afact[0] * qfactorial(alpha));
}

AverageResult expected_trace_f(const Spectrum& s, const ScalarFunction& f,
                               const EvalOptions& options) {
    const int n = s.n();
    std::vector<double> d = s.eigenvalues();
    require_distinct(PointSet(d));

    // Entry magnitude estimate decides between the quad-precision path and
    // the log-represented fallback.
    const int span = polynomial_span(f);
    const auto entry_log_bound = [&](const std::vector<double>& pts) {
        double max_abs_log = 0.0;
        for (double x : pts)
            max_abs_log = std::max(max_abs_log, std::abs(std::log(x)));
        return (n - 1 + span) * max_abs_log +
               static_cast<double>(std::lgamma(
                   static_cast<long double>(n + span) + 1.0L));
    };
    bool use_qfloat = entry_log_bound(d) < detail::kQfloatLogLimit - 1000.0;

    // A monomial average is homogeneous of degree m in the spectrum, so a
    // pure magnitude factor can be pulled out exactly. When the scale (not
    // the spread) is what overflows the quad-precision window, dividing
    // out the geometric mean keeps the accurate path; this matters because
    // the log-domain fallback cancels badly on same-scale spectra.
    double log_scale = 0.0;
    if (!use_qfloat && f.kind() == Kind::Monomial) {
        double mean_log = 0.0;
        for (double x : d) mean_log += std::log(x);
        mean_log /= n;
        std::vector<double> scaled = d;
        const double c = std::exp(mean_log);
        for (double& x : scaled) x /= c;
        if (entry_log_bound(scaled) < detail::kQfloatLogLimit - 1000.0) {
            d = std::move(scaled);
            log_scale = f.degree() * mean_log;
            use_qfloat = true;
        }
    }

    KTermSum sum;
    for (int k = 0; k < n; ++k) {
        const int alpha = n - k - 1;
        SignedLogValue det;
        int nodes = 0;
        if (use_qfloat) {
            const FRow frow = f_row_over_afact(f, alpha, d, options);
            nodes = frow.nodes;
            std::vector<std::vector<qfloat>> a(n, std::vector<qfloat>(n));
            for (int r = 0; r < n; ++r)
                for (int j = 0; j < n; ++j)
                    a[r][j] = r == k ? frow.over_afact[j]
                                     : detail::qpow_int(d[j], n - 1 - r);
            det = detail::det_column_scaled(a);
        } else {
            const LogFRow frow = f_row_log(f, alpha, d, options);
            nodes = frow.nodes;
            std::vector<std::vector<SignedLogValue>> a(
                n, std::vector<SignedLogValue>(n));
            for (int r = 0; r < n; ++r)
                for (int j = 0; j < n; ++j)
                    a[r][j] = r == k
                                  ? frow.over_afact[j]
                                  : SignedLogValue::from_log(
                                        1, (n - 1 - r) * std::log(d[j]));
            det = detail::logdet_scaled(a);
        }
        sum.quad_nodes = std::max(sum.quad_nodes, nodes);
        sum.add(det);
    }

    const SignedLogValue delta = vandermonde_logdet(PointSet(d));
    AverageResult result;
    result.value = finite_or_throw(
        sum.total / delta * SignedLogValue::from_log(1, log_scale),
        "expected_trace_f");
    result.method = Method::Determinant;
    result.diagnostics.min_rel_gap = s.min_rel_gap();
    result.diagnostics.quad_nodes = sum.quad_nodes;
    result.diagnostics.log_condition = sum.log_condition();
    return result;
}

AverageResult expected_trace_moment(const Spectrum& s, int m) {
    if (m < 1)
        throw DomainError("expected_trace_moment: m must be >= 1, got " +
                          std::to_string(m));
    const int n = s.n();
    const PointSet pts(s.eigenvalues());
    require_distinct(pts);

    KTermSum sum;
    const int kmax = std::min(n, m) - 1;
    for (int k = 0; k <= kmax; ++k) {
        // h(lambda_k) s_{lambda_k}(I_n) = (m+n-(k+1))!/(n-(k+1))!
        const double log_weight = static_cast<double>(
            std::lgamma(static_cast<long double>(m + n - k)) -
            std::lgamma(static_cast<long double>(n - k)));
        SignedLogValue term = schur_bialternant(Partition::hook_shape(m, k), pts) *
                              SignedLogValue::from_log(1, log_weight);
        if (k % 2 == 1) term = -term;
        sum.add(term);
    }

    AverageResult result;
    result.value = finite_or_throw(sum.total, "expected_trace_moment");
    result.method = Method::SchurSum;
    result.diagnostics.min_rel_gap = s.min_rel_gap();
    result.diagnostics.log_condition = sum.log_condition();
    return result;
}

double moment_2x2_closed(double d1, double d2, int m) {
    if (m < 1)
        throw DomainError("moment_2x2_closed: m must be >= 1, got " +
                          std::to_string(m));
    if (!std::isfinite(d1) || d1 <= 0.0 || !std::isfinite(d2) || d2 <= 0.0)
        throw DomainError("moment_2x2_closed: eigenvalues must be positive");
    const long double fact = std::tgamma(static_cast<long double>(m) + 1.0L);
    const double gap = min_relative_gap({d1, d2});
    if (gap < kDegenerateRelGap) {
        const long double dm = 0.5L * (static_cast<long double>(d1) + d2);
        return static_cast<double>(
            fact * (static_cast<long double>(m) * m + m + 2) *
            std::pow(dm, static_cast<long double>(m)));
    }
    const long double a = d1, b = d2;
    const long double lead =
        (m + 1) * (std::pow(a, static_cast<long double>(m + 1)) -
                   std::pow(b, static_cast<long double>(m + 1))) /
        (a - b);
    const long double tail = (a * std::pow(b, static_cast<long double>(m)) -
                              b * std::pow(a, static_cast<long double>(m))) /
                             (a - b);
    return static_cast<double>(fact * (lead + tail));
}

double capacity_2x2_closed(double d1, double d2) {
    if (!std::isfinite(d1) || d1 <= 0.0 || !std::isfinite(d2) || d2 <= 0.0)
        throw DomainError("capacity_2x2_closed: eigenvalues must be positive");
    const double gap = min_relative_gap({d1, d2});
    if (gap < kDegenerateRelGap) {
        // Confluent limit of the two-eigenvalue capacity:
        //   integral e^{-t} [(1+t)log(1+td) + td(t-1)/(1+td)] dt
        // = I_0 + I_1 + K_0 - K_1 = I_0 + I_1 + (1+1/d) K_0 - 1/d.
        const double dm = 0.5 * (d1 + d2);
        return log_moment_closed(0, dm) + log_moment_closed(1, dm) +
               (1.0 + 1.0 / dm) * rational_moment_closed(0, dm) - 1.0 / dm;
    }
    // f0(d) = integral e^{-t} (td) log(1+td) dt = d I_1(d)
    // f1(d) = integral e^{-t} log(1+td) dt = I_0(d)
    const double f0_1 = d1 * log_moment_closed(1, d1);
    const double f0_2 = d2 * log_moment_closed(1, d2);
    const double f1_1 = log_moment_closed(0, d1);
    const double f1_2 = log_moment_closed(0, d2);
    return (f0_1 - f0_2 + d1 * f1_2 - d2 * f1_1) / (d1 - d2);
}

namespace {

std::vector<std::vector<int>> cluster_indices(const std::vector<double>& sorted) {
    std::vector<std::vector<int>> clusters;
    for (int i = 0; i < static_cast<int>(sorted.size()); ++i) {
        const bool joins =
            !clusters.empty() &&
            min_relative_gap({sorted[clusters.back().back()], sorted[i]}) <
                kDegenerateRelGap;
        if (joins)
            clusters.back().push_back(i);
        else
            clusters.push_back({i});
    }
    return clusters;
}

}  // namespace

AverageResult degenerate_regularize(const Spectrum& s, const ScalarFunction& f,
                                    const EvalOptions& options) {
    if (!s.degenerate())
        throw DomainError(
            "degenerate_regularize: spectrum has no coincident eigenvalues; "
            "use expected_trace_f");

    std::vector<double> sorted = s.eigenvalues();
    std::sort(sorted.begin(), sorted.end());
    const std::vector<std::vector<int>> clusters = cluster_indices(sorted);

    std::vector<double> reps;
    std::vector<int> sizes;
    int max_size = 1;
    for (const auto& c : clusters) {
        double mean = 0.0;
        for (int i : c) mean += sorted[i];
        reps.push_back(mean / static_cast<double>(c.size()));
        sizes.push_back(static_cast<int>(c.size()));
        max_size = std::max(max_size, static_cast<int>(c.size()));
    }

    // The perturbation must stay well inside the gap to the next cluster.
    double eps0 = 1e-4;
    for (std::size_t c = 0; c + 1 < reps.size(); ++c) {
        const double gap = (reps[c + 1] - reps[c]) / reps[c + 1];
        eps0 = std::min(eps0, gap / (8.0 * max_size));
    }
    if (eps0 / 4.0 < 10.0 * kDegenerateRelGap)
        throw NumericalFailure(
            "degenerate_regularize: eigenvalue clusters are too close to "
            "separate by perturbation");

    const double eps_grid[3] = {eps0, eps0 / 2.0, eps0 / 4.0};
    double v[3];
    Diagnostics diag;
    diag.min_rel_gap = s.min_rel_gap();
    for (int e = 0; e < 3; ++e) {
        std::vector<double> perturbed;
        perturbed.reserve(sorted.size());
        for (std::size_t c = 0; c < reps.size(); ++c)
            for (int j = 0; j < sizes[c]; ++j)
                perturbed.push_back(reps[c] * (1.0 + j * eps_grid[e]));
        const AverageResult r =
            expected_trace_f(Spectrum(std::move(perturbed)), f, options);
        v[e] = r.value;
        diag.quad_nodes = std::max(diag.quad_nodes, r.diagnostics.quad_nodes);
        diag.log_condition =
            std::max(diag.log_condition, r.diagnostics.log_condition);
    }

    const double diff1 = v[1] - v[0];
    const double diff2 = v[2] - v[1];
    const double floor =
        1e-11 * (std::abs(v[0]) + std::abs(v[1]) + std::abs(v[2])) / 3.0 +
        1e-300;
    if (std::abs(diff1) > floor || std::abs(diff2) > floor) {
        if (diff1 * diff2 < 0.0 && std::abs(diff2) > floor)
            throw ExtrapolationUnstable(
                "perturbation sequence is not monotone");
        if (std::abs(diff2) > 0.75 * std::abs(diff1) + floor)
            throw ExtrapolationUnstable(
                "perturbation differences are not contracting");
    }

    const double w1 = 2.0 * v[1] - v[0];
    const double w2 = 2.0 * v[2] - v[1];
    const double extrapolated = (4.0 * w2 - w1) / 3.0;

    AverageResult result;
    result.value = extrapolated;
    result.method = Method::PerturbedLimit;
    diag.extrap_residual = std::abs(extrapolated - w2);
    result.diagnostics = diag;
    return result;
}

AverageResult trace_average(const Spectrum& s, const ScalarFunction& f,
                            const EvalOptions& options) {
    if (s.degenerate()) {
        AverageResult r = degenerate_regularize(s, f, options);
        r.diagnostics.degenerate_routed = true;
        return r;
    }
    return expected_trace_f(s, f, options);
}

AverageResult trace_moment(const Spectrum& s, int m,
                           const EvalOptions& options) {
    if (s.degenerate()) {
        AverageResult r =
            degenerate_regularize(s, ScalarFunction::monomial(m), options);
        r.diagnostics.degenerate_routed = true;
        return r;
    }
    return expected_trace_moment(s, m);
}

AverageResult capacity(const Spectrum& s, double snr,
                       const EvalOptions& options) {
    if (!std::isfinite(snr) || snr <= 0.0)
        throw DomainError("capacity: snr must be positive, got " +
                          std::to_string(snr));
    return trace_average(s.scaled(snr), ScalarFunction::capacity(1.0), options);
}

AverageResult mmse(const Spectrum& s, double snr, const EvalOptions& options) {
    if (!std::isfinite(snr) || snr <= 0.0)
        throw DomainError("mmse: snr must be positive, got " +
                          std::to_string(snr));
    return trace_average(s.scaled(snr), ScalarFunction::mmse(1.0), options);
}

}  // namespace gaussavg
