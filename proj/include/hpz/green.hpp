#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "hpz/bath.hpp"
#include "hpz/config.hpp"

namespace hpz {

struct GreenEval {
    double t{0.0};
    double g{0.0};   // G
    double g1{0.0};  // dG/dt
    double g2{0.0};  // d2G/dt2
    double g3{0.0};  // d3G/dt3 (NaN when unavailable)
};

struct LocalCoefficients {
    double t{0.0};
    double two_gamma{0.0};
    TaggedValue omega_sq;
};

struct DiffusionCoefficients {
    double t{0.0};
    double f{0.0};
    double h{0.0};
    // The force correlations <XF+FX> = 2 hbar Gamma f and <XdotF+FXdot> = 2 hbar Gamma h.
    double xf_sym{0.0};
    double vf_sym{0.0};
};

// Closed-form Green function of the free particle as a sum of terms
// coef * u^power * exp(-rate u), power in {0, 1}.
struct GreenTerm {
    double coef;
    double rate;
    int power;
};

class ClosedGreen {
public:
    explicit ClosedGreen(const PhysicalConfig& c);

    // d^order G/du^order at u >= 0.
    double derivative(double u, int order) const;
    GreenEval eval(double t) const;
    // int_0^t G^{(order)}(u) e^{i w u} du
    std::complex<double> finite_transform(double w, double t, int order) const;
    // finite_transform(w, t, order) = P + Q e^{iwt}; P and Q vary slowly in w.
    // Singular at w = 0 for a zero-rate term.
    std::pair<std::complex<double>, std::complex<double>> transform_parts(double w, double t,
                                                                          int order) const;
    const std::vector<GreenTerm>& terms() const { return terms_; }

private:
    std::vector<GreenTerm> terms_;
    std::vector<double> initial_;  // derivatives of orders 0..3 at u = 0
};

// Characteristic frequencies of the model (zeta/m, omega_0, 1/tau), used to
// place quadrature breakpoints.
std::vector<double> spectral_features(const PhysicalConfig& c);
// Largest feature that must be resolved explicitly in an integral oscillating
// as e^{iwt}; a memory cutoff 1/tau with t >> tau is left to the tail.
double oscillation_head_scale(const PhysicalConfig& c, double t);

// True when G has the closed forms (free particle, either bath).
bool has_closed_green(const PhysicalConfig& c);

GreenEval green(const PhysicalConfig& c, double t);

// Numerical inversion of alpha: G = (2/pi) int Im alpha sin(wt) dw, plus
// differentiated integrals. g3 is not computed (NaN).
GreenEval green_numerical(const PhysicalConfig& c, double t);

// |m G'' + int_0^t mu(t-t') G'(t') dt' + K G|
double green_ode_residual(const PhysicalConfig& c, double t);

LocalCoefficients local_coefficients(const PhysicalConfig& c, double t);

// Local coefficients from the generic ratio form with the analytic G derivatives.
LocalCoefficients local_coefficients_from_green(const GreenEval& g);

// c_F(s) = (1/2)<F(s)F(0)+F(0)F(s)> for s > 0 (regular part only).
double force_correlation(const PhysicalConfig& c, double s);

DiffusionCoefficients diffusion_coefficients(const PhysicalConfig& c, double t);

}  // namespace hpz
