#pragma once

#include <cstddef>
#include <string>

namespace hpz::simd {

enum class Level { Scalar, Avx2 };

// Level chosen at first use: AVX2+FMA when the CPU has both, unless
// HPZ_SIMD=scalar is set in the environment.
Level active_level();
// Overrides dispatch (tests). Requesting Avx2 on a CPU without it throws DomainError.
void set_level(Level level);
bool avx2_available();
std::string to_string(Level level);

// sum_i a[i] x[i] + b[i] y[i]
double dual_dot(const double* a, const double* x, const double* b, const double* y, std::size_t n);

// Coefficients of one right-hand-side row of the phase-space equation
//   W_t = -(p/m) W_q + m Om2 q W_p + two_gamma (p W)_p + d_pp W_pp + d_qp W_qp
// on a uniform grid with centred differences.
struct RowCoefficients {
    double inv_m{1.0};
    double drift_p{0.0};   // m Om2 q of this row
    double two_gamma{0.0};
    double d_pp{0.0};
    double d_qp{0.0};
    double inv_2dq{0.0};
    double inv_2dp{0.0};
    double inv_dp2{0.0};
    double inv_4dqdp{0.0};
};

// out[j] for j in [1, n-1); rows below/above are q-1 and q+1, all of
// length n, p the momentum grid. out[0] and out[n-1] are left untouched.
void phase_space_row(const double* below, const double* row, const double* above, const double* p,
                     double* out, std::size_t n, const RowCoefficients& k);

namespace scalar {
double dual_dot(const double* a, const double* x, const double* b, const double* y, std::size_t n);
void phase_space_row(const double* below, const double* row, const double* above, const double* p,
                     double* out, std::size_t n, const RowCoefficients& k);
}  // namespace scalar

namespace avx2 {
double dual_dot(const double* a, const double* x, const double* b, const double* y, std::size_t n);
void phase_space_row(const double* below, const double* row, const double* above, const double* p,
                     double* out, std::size_t n, const RowCoefficients& k);
}  // namespace avx2

}  // namespace hpz::simd
