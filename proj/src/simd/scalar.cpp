#include "hpz/simd/kernels.hpp"

namespace hpz::simd::scalar {

double dual_dot(const double* a, const double* x, const double* b, const double* y, std::size_t n) {
    // four partial sums, in the same lane order as the vector version
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        for (int l = 0; l < 4; ++l) s[l] += a[i + l] * x[i + l] + b[i + l] * y[i + l];
    double tail = 0.0;
    for (; i < n; ++i) tail += a[i] * x[i] + b[i] * y[i];
    return ((s[0] + s[1]) + (s[2] + s[3])) + tail;
}

void phase_space_row(const double* below, const double* row, const double* above, const double* p,
                     double* out, std::size_t n, const RowCoefficients& k) {
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double wq = (above[j] - below[j]) * k.inv_2dq;
        const double wp = (row[j + 1] - row[j - 1]) * k.inv_2dp;
        const double pw = (p[j + 1] * row[j + 1] - p[j - 1] * row[j - 1]) * k.inv_2dp;
        const double wpp = (row[j + 1] - 2.0 * row[j] + row[j - 1]) * k.inv_dp2;
        const double wqp = (above[j + 1] - above[j - 1] - below[j + 1] + below[j - 1]) * k.inv_4dqdp;
        out[j] = -p[j] * k.inv_m * wq + k.drift_p * wp + k.two_gamma * pw + k.d_pp * wpp + k.d_qp * wqp;
    }
}

}  // namespace hpz::simd::scalar
