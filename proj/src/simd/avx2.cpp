// Compiled with -mavx2 -mfma; only reached through the dispatcher after a CPU check.
#include <immintrin.h>

#include "hpz/simd/kernels.hpp"

namespace hpz::simd::avx2 {

double dual_dot(const double* a, const double* x, const double* b, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d ax = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(x + i));
        acc = _mm256_add_pd(acc, _mm256_fmadd_pd(_mm256_loadu_pd(b + i), _mm256_loadu_pd(y + i), ax));
    }
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    double tail = 0.0;
    for (; i < n; ++i) tail += a[i] * x[i] + b[i] * y[i];
    return ((s[0] + s[1]) + (s[2] + s[3])) + tail;
}

void phase_space_row(const double* below, const double* row, const double* above, const double* p,
                     double* out, std::size_t n, const RowCoefficients& k) {
    const __m256d inv_m = _mm256_set1_pd(-k.inv_m), drift = _mm256_set1_pd(k.drift_p),
                  gamma = _mm256_set1_pd(k.two_gamma), dpp = _mm256_set1_pd(k.d_pp),
                  dqp = _mm256_set1_pd(k.d_qp), i2dq = _mm256_set1_pd(k.inv_2dq),
                  i2dp = _mm256_set1_pd(k.inv_2dp), idp2 = _mm256_set1_pd(k.inv_dp2),
                  i4 = _mm256_set1_pd(k.inv_4dqdp), two = _mm256_set1_pd(2.0);
    std::size_t j = 1;
    for (; j + 4 < n; j += 4) {
        const __m256d r0 = _mm256_loadu_pd(row + j), rl = _mm256_loadu_pd(row + j - 1),
                      rr = _mm256_loadu_pd(row + j + 1);
        const __m256d wq = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(above + j), _mm256_loadu_pd(below + j)), i2dq);
        const __m256d wp = _mm256_mul_pd(_mm256_sub_pd(rr, rl), i2dp);
        const __m256d pw = _mm256_mul_pd(
            _mm256_sub_pd(_mm256_mul_pd(_mm256_loadu_pd(p + j + 1), rr), _mm256_mul_pd(_mm256_loadu_pd(p + j - 1), rl)),
            i2dp);
        const __m256d wpp = _mm256_mul_pd(_mm256_add_pd(_mm256_sub_pd(rr, _mm256_mul_pd(two, r0)), rl), idp2);
        const __m256d wqp = _mm256_mul_pd(
            _mm256_add_pd(_mm256_sub_pd(_mm256_sub_pd(_mm256_loadu_pd(above + j + 1), _mm256_loadu_pd(above + j - 1)),
                                        _mm256_loadu_pd(below + j + 1)),
                          _mm256_loadu_pd(below + j - 1)),
            i4);
        __m256d v = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(p + j), inv_m), wq);
        v = _mm256_fmadd_pd(drift, wp, v);
        v = _mm256_fmadd_pd(gamma, pw, v);
        v = _mm256_fmadd_pd(dpp, wpp, v);
        v = _mm256_fmadd_pd(dqp, wqp, v);
        _mm256_storeu_pd(out + j, v);
    }
    if (j + 1 < n) {
        // remainder [j, n-1) through the reference stencil on shifted rows
        scalar::phase_space_row(below + j - 1, row + j - 1, above + j - 1, p + j - 1, out + j - 1, n - j + 1, k);
    }
}

}  // namespace hpz::simd::avx2
