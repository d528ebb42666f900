#pragma once

#include <complex>

#include "hpz/config.hpp"

namespace hpz {

using cplx = std::complex<double>;

// A real value that may carry a Dirac delta at the origin. For the Ohmic
// kernel mu(t) = 2 zeta delta(t) the pointwise value at t > 0 is 0 and the
// delta weight is reported separately; callers must branch on `distributional`.
struct TaggedValue {
    double value{0.0};
    double delta_weight{0.0};
    bool distributional{false};
};

struct RelaxationRoots {
    double plus;   // gamma_+
    double minus;  // gamma_-
};

// mu~(z), the Fourier-Laplace transform of the memory kernel, Im z >= 0.
cplx memory_transform(const PhysicalConfig& c, cplx z);

// mu(t), t >= 0.
TaggedValue memory_kernel(const PhysicalConfig& c, double t);

// alpha(omega + i0+) = 1/(-m w^2 - i w mu~(w) + K).
cplx response(const PhysicalConfig& c, double omega);

// Im alpha(omega + i0+) in a form that stays finite-friendly for integrands.
double response_imag(const PhysicalConfig& c, double omega);

// Roots of the SRT response denominator, gamma_+ >= gamma_- > 0.
RelaxationRoots gamma_pm(const PhysicalConfig& c);

// Partial-fraction form of alpha for the free SRT particle, used as a check.
cplx response_partial_fraction(const PhysicalConfig& c, cplx z);

// coth(hbar w / 2kT) in the configured regime: high-T -> 2kT/(hbar w),
// zero -> 1, exact -> full coth with a Laurent expansion near w = 0.
double thermal_weight(const PhysicalConfig& c, double omega);

}  // namespace hpz
