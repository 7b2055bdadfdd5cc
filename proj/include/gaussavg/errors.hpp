#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace gaussavg {

namespace detail {

// std::to_string(double) prints %f, turning 1e-11 into "0.000000"; error
// messages need the compact form.
inline std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

// Base class for all library errors. Two broad families matter to callers:
// input/domain problems (bad eigenvalues, malformed files, out-of-range
// parameters) and numerical failures (iteration caps, tolerance misses).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid input: nonpositive eigenvalue, bad partition, x <= 0, etc.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Two spectrum points coincide within the relative gap tolerance, so the
// determinant-ratio paths have no significant digits left.
class DegenerateSpectrum : public Error {
public:
    DegenerateSpectrum(std::size_t i, std::size_t j, double gap)
        : Error("degenerate spectrum: points " + std::to_string(i) + " and " +
                std::to_string(j) + " coincide (relative gap " + detail::fmt_g(gap) + ")"),
          index_a(i),
          index_b(j),
          rel_gap(gap) {}
    std::size_t index_a;
    std::size_t index_b;
    double rel_gap;
};

// Adaptive quadrature hit its node cap without the requested agreement.
class ToleranceNotMet : public Error {
public:
    ToleranceNotMet(double previous, double last, double rel_tol)
        : Error("quadrature tolerance " + detail::fmt_g(rel_tol) +
                " not met at node cap; last estimates " + detail::fmt_g(previous) + ", " +
                detail::fmt_g(last)),
          previous_estimate(previous),
          last_estimate(last) {}
    double previous_estimate;
    double last_estimate;
};

// An iterative kernel (tridiagonal eigensolver) exceeded its iteration cap.
class NumericalFailure : public Error {
public:
    explicit NumericalFailure(const std::string& msg) : Error(msg) {}
};

// Matrix fails the Hermitian symmetry check.
class NotHermitian : public Error {
public:
    explicit NotHermitian(const std::string& msg) : Error(msg) {}
};

// Jacobi eigensolver did not reach its off-diagonal threshold.
class NoConvergence : public Error {
public:
    explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

// Input matrix has a nonpositive eigenvalue.
class NonPositiveDefinite : public Error {
public:
    explicit NonPositiveDefinite(double smallest)
        : Error("matrix is not positive definite (smallest eigenvalue " +
                detail::fmt_g(smallest) + ")"),
          smallest_eigenvalue(smallest) {}
    double smallest_eigenvalue;
};

// The perturbed-spectrum evaluations do not converge as the perturbation
// shrinks, so extrapolating to zero would be meaningless.
class ExtrapolationUnstable : public Error {
public:
    explicit ExtrapolationUnstable(const std::string& msg) : Error(msg) {}
};

// Command-line / configuration problem. Message names the offending flag.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& msg) : Error(msg) {}
};

}  // namespace gaussavg
