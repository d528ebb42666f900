#pragma once

#include <vector>

#include "hpz/config.hpp"

namespace hpz {

// A quantity that may be divergent without a frequency cutoff. When
// `divergent` is set, `value` is the cutoff-regularized value (NaN if the
// configuration has no cutoff).
struct RegularizedValue {
    double value{0.0};
    bool divergent{false};
    double cutoff{0.0};

    // Throws DivergenceError for a divergent value with no cutoff.
    double require(const char* who) const;
};

struct DisplacementEval {
    double t{0.0};
    double s{0.0};
    double s1{0.0};
    double s2{0.0};
    RegularizedValue s2_at_0;
    RegularizedValue s4_at_0;
};

struct XMoments {
    double t{0.0};
    double xx{0.0};      // <X^2>
    double vv{0.0};      // <Xdot^2>
    double xv_sym{0.0};  // <X Xdot + Xdot X>
    bool cutoff_dependent{false};
};

struct CovarianceMatrix {
    double a_pp{0.0};  // m^2 <Xdot^2>
    double a_pq{0.0};  // (m/2) <X Xdot + Xdot X>
    double a_qq{0.0};  // <X^2>

    double det() const { return a_pp * a_qq - a_pq * a_pq; }
};

struct EquilibriumMoments {
    double x_sq{0.0};
    double v_sq{0.0};
};

// Mean-square displacement of the stationary process,
// s(t) = (2 hbar/pi) int Im alpha coth(hbar w/2kT) (1 - cos wt) dw.
DisplacementEval msd(const PhysicalConfig& c, double t);

// Second moments of the fluctuating position X(t) = int_0^t G(t-t') F(t') dt'.
XMoments x_moments(const PhysicalConfig& c, double t);

// Same moments by direct frequency quadrature,
// <X^2> = (hbar/pi) int Re mu(w) w coth |int_0^t G(u) e^{iwu} du|^2 dw,
// valid for the free particle in every regime (cutoff = upper limit).
XMoments x_moments_spectral(const PhysicalConfig& c, double t);

// <X^2> for a wave packet whose initial velocities are thermal at the bath
// temperature: adds m kT G(t)^2.
double thermal_packet_xx(const PhysicalConfig& c, double t);

CovarianceMatrix covariance(const PhysicalConfig& c, double t);
CovarianceMatrix covariance_from(const PhysicalConfig& c, const XMoments& x);

EquilibriumMoments equilibrium_moments(const PhysicalConfig& c);

struct DivergenceFit {
    double slope{0.0};      // d<X^2>/d log(cutoff)
    double intercept{0.0};
    double max_residual{0.0};
    std::vector<double> cutoffs;
    std::vector<double> xx;
};

// Zero-temperature <X^2>(t_probe) for each cutoff (frequency quadrature with
// a hard cutoff) and its least-squares slope against log(cutoff).
DivergenceFit divergence_probe(const PhysicalConfig& c, double t_probe,
                               const std::vector<double>& cutoffs);

}  // namespace hpz
