#pragma once

#include <vector>

#include "gaussavg/signed_log.hpp"

// Internal: quad-precision determinant kernel shared by the Schur and
// engine determinant paths. Near-confluent spectra make the power-matrix
// columns cancel to order (gap)^(c-1); carrying the elimination in
// __float128 keeps that cancellation far above the noise floor.
namespace gaussavg::detail {

using qfloat = __float128;

inline qfloat qabs(qfloat x) { return x < 0 ? -x : x; }

// base^e by binary powering, e >= 0.
qfloat qpow_int(qfloat base, long long e);

// In-place LU with partial pivoting. Returns the determinant of the
// (destroyed) matrix as sign and natural log of magnitude.
struct QDet {
    int sign = 0;
    long double log_abs = 0.0L;
};
QDet lu_det(std::vector<std::vector<qfloat>>& a);

// Determinant after dividing each column by its largest magnitude; the
// factored-out column scales re-enter through the log term.
SignedLogValue det_column_scaled(std::vector<std::vector<qfloat>>& a);

// det [ x_j ^ exps_i ]_{i,j} for positive points, exponents >= 0.
// Falls back to the signed-log elimination in `schur` when the entries
// exceed the __float128 range.
SignedLogValue det_power_matrix(const std::vector<double>& points,
                                const std::vector<long long>& exps);

// Largest |exps_i * ln(x_j)|; the qfloat path is valid while this is small.
double power_matrix_log_range(const std::vector<double>& points,
                              const std::vector<long long>& exps);

inline constexpr double kQfloatLogLimit = 11000.0;

}  // namespace gaussavg::detail
