#include "gaussavg/detail/qlu.hpp"

#include <cmath>
#include <cstdlib>

#include "gaussavg/errors.hpp"
#include "gaussavg/schur.hpp"

namespace gaussavg::detail {

qfloat qpow_int(qfloat base, long long e) {
    if (e < 0) std::abort();
    qfloat result = 1;
    qfloat acc = base;
    while (e > 0) {
        if (e & 1) result *= acc;
        acc *= acc;
        e >>= 1;
    }
    return result;
}

QDet lu_det(std::vector<std::vector<qfloat>>& a) {
    const int n = static_cast<int>(a.size());
    QDet det{1, 0.0L};
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (qabs(a[r][col]) > qabs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0) return {0, 0.0L};
        if (pivot != col) {
            std::swap(a[pivot], a[col]);
            det.sign = -det.sign;
        }
        const qfloat p = a[col][col];
        if (p < 0) det.sign = -det.sign;
        det.log_abs += std::log(static_cast<long double>(qabs(p)));
        for (int r = col + 1; r < n; ++r) {
            const qfloat factor = a[r][col] / p;
            if (factor == 0) continue;
            for (int c = col + 1; c < n; ++c) a[r][c] -= factor * a[col][c];
            a[r][col] = 0;
        }
    }
    return det;
}

SignedLogValue det_column_scaled(std::vector<std::vector<qfloat>>& a) {
    const int n = static_cast<int>(a.size());
    if (n == 0) return SignedLogValue::one();
    long double scale_log_sum = 0.0L;
    for (int j = 0; j < n; ++j) {
        qfloat col_max = 0;
        for (int i = 0; i < n; ++i)
            if (qabs(a[i][j]) > col_max) col_max = qabs(a[i][j]);
        if (col_max == 0) return SignedLogValue::zero();
        scale_log_sum += std::log(static_cast<long double>(col_max));
        for (int i = 0; i < n; ++i) a[i][j] /= col_max;
    }
    const QDet det = lu_det(a);
    if (det.sign == 0) return SignedLogValue::zero();
    return SignedLogValue::from_log(
        det.sign, static_cast<double>(scale_log_sum + det.log_abs));
}

double power_matrix_log_range(const std::vector<double>& points,
                              const std::vector<long long>& exps) {
    double worst = 0.0;
    for (double x : points) {
        const double lx = std::abs(std::log(x));
        for (long long e : exps) worst = std::max(worst, static_cast<double>(e) * lx);
    }
    return worst;
}

SignedLogValue det_power_matrix(const std::vector<double>& points,
                                const std::vector<long long>& exps) {
    const int n = static_cast<int>(points.size());
    if (static_cast<int>(exps.size()) != n)
        throw DomainError("det_power_matrix: exponent row count mismatch");
    if (n == 0) return SignedLogValue::one();

    if (power_matrix_log_range(points, exps) < kQfloatLogLimit) {
        std::vector<std::vector<qfloat>> a(n, std::vector<qfloat>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a[i][j] = qpow_int(points[j], exps[i]);
        return det_column_scaled(a);
    }

    // Entries exceed the qfloat range: fall back to log-represented
    // entries, trading conditioning for range.
    std::vector<std::vector<SignedLogValue>> m(n,
                                               std::vector<SignedLogValue>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m[i][j] = exps[i] == 0
                          ? SignedLogValue::one()
                          : SignedLogValue::from_log(
                                1, static_cast<double>(exps[i]) *
                                       std::log(points[j]));
    return detail::logdet_scaled(m);
}

}  // namespace gaussavg::detail
