#pragma once

#include <vector>

#include "gaussavg/partitions.hpp"
#include "gaussavg/signed_log.hpp"

namespace gaussavg {

// Relative gap below which two evaluation points count as coincident: the
// Vandermonde ratio loses all significant digits in 64-bit floats past here.
inline constexpr double kDegenerateRelGap = 1e-9;

// Evaluation points x_1..x_n (eigenvalues, when used by the engine).
struct PointSet {
    std::vector<double> values;

    PointSet() = default;
    explicit PointSet(std::vector<double> v) : values(std::move(v)) {}
    PointSet(std::initializer_list<double> v) : values(v) {}
    int size() const { return static_cast<int>(values.size()); }
};

// Smallest relative pairwise gap |x_i - x_j| / max(x_i, x_j); +inf for n < 2.
double min_relative_gap(const std::vector<double>& values);

// Throws DegenerateSpectrum naming the first colliding pair, if any.
void require_distinct(const PointSet& pts, double rel_tol = kDegenerateRelGap);

// prod_{j<k} (x_j - x_k) in signed-log form. A single point gives 1.
SignedLogValue vandermonde_logdet(const PointSet& pts);

// Schur polynomial s_lambda(x_1..x_n) as the bialternant ratio: the power
// matrix determinant with exponents lambda_i + n - 1 - i over the Vandermonde
// determinant. Points must be positive and pairwise distinct.
SignedLogValue schur_bialternant(const Partition& p, const PointSet& pts);

// Independent oracle: sum of monomials over all semistandard Young tableaux
// of shape lambda with entries in 1..n. Exact, permutation invariant, and
// defined for coincident points. Bounded to weight <= 12, n <= 6.
double schur_ssyt_oracle(const Partition& p, const PointSet& pts);

// s_lambda at the identity: prod_{i<j} (lambda_i - lambda_j + j - i)/(j - i).
SignedLogValue schur_identity_dim(const Partition& p, int n);

// Tr(A^m) as the alternating hook-shape Schur sum
// sum_{k=0}^{min(n,m)-1} (-1)^k s_{(m-k,1^k)}(A), evaluated via bialternants.
double trace_power_schur(const PointSet& pts, int m);

namespace detail {

// Determinant of a matrix whose entries are given in signed-log form.
// Each row is scaled by its largest magnitude (re-multiplied in log space),
// then eliminated by LU with partial pivoting in extended precision.
SignedLogValue logdet_scaled(const std::vector<std::vector<SignedLogValue>>& m);

}  // namespace detail

}  // namespace gaussavg
