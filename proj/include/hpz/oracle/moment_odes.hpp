#pragma once

#include <vector>

#include "hpz/config.hpp"
#include "hpz/evolution.hpp"
#include "hpz/oracle/master_equation.hpp"

namespace hpz::oracle {

// Central second moments; xp_sym = <xp + px>/2 - <x><p>.
struct SecondMoments {
    double t{0.0};
    double x_sq{0.0};
    double xp_sym{0.0};
    double p_sq{0.0};
};

SecondMoments initial_moments(const InitialState& s, const PhysicalConfig& c);

// Adaptive Dormand-Prince (tolerance 1e-9) on the second-moment equations of
// the master equation, reported at each of `times` (ascending, >= 0).
std::vector<SecondMoments> integrate_moment_odes(const PhysicalConfig& c, const SecondMoments& initial,
                                                 const std::vector<double>& times,
                                                 DiffusionRoute route = DiffusionRoute::MomentConsistent);

struct DiffusionCrossCheck {
    double t{0.0};
    double xf_sym_moments{0.0}, vf_sym_moments{0.0};  // from the X moments
    double xf_sym_kernel{0.0}, vf_sym_kernel{0.0};    // force-correlation route
    double f_rel{0.0}, h_rel{0.0};                    // relative differences
};

// The moment-consistent correlations against the force-correlation ones of
// diffusion_coefficients. They agree for the Ohmic bath and for SRT at t << tau.
DiffusionCrossCheck diffusion_from_moments(const PhysicalConfig& c, double t);

}  // namespace hpz::oracle
