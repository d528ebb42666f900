#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "hpz/config.hpp"
#include "hpz/fluctuations.hpp"

namespace hpz {

enum class StateKind { Gaussian, ThermalGaussian, CatPair, ThermalCatPair };

struct InitialState {
    StateKind kind{StateKind::Gaussian};
    double x0{0.0};     // centre (single packets)
    double sigma{1.0};  // width of each packet
    double d{0.0};      // separation (pairs)

    static InitialState gaussian(double x0, double sigma, bool thermal = false);
    static InitialState cat(double d, double sigma, bool thermal = false);

    bool thermal() const { return kind == StateKind::ThermalGaussian || kind == StateKind::ThermalCatPair; }
    bool pair() const { return kind == StateKind::CatPair || kind == StateKind::ThermalCatPair; }
    void validate() const;
};

// coef * exp(-1/2 v.M.v + k.v), v = (Q, P).
struct GaussianTerm {
    std::complex<double> coef;
    double m_qq{0.0}, m_qp{0.0}, m_pp{0.0};
    std::complex<double> k_q, k_p;
};

// Fourier transform of a Wigner function,
// W~(Q,P) = int dq dp exp(-i(Pq + Qp)/hbar) W(q,p), as a sum of Gaussian terms.
struct WignerTransform {
    std::vector<GaussianTerm> terms;
    std::complex<double> operator()(double Q, double P) const;
};

// hbar / sqrt(m kT); infinite at T = 0.
double thermal_length(const PhysicalConfig& c);

WignerTransform wigner_transform(const InitialState& s, const PhysicalConfig& c);
// Transform of a phase-space point (q', p'): exp(-i(P q' + Q p')/hbar).
WignerTransform point_transform(double q, double p, const PhysicalConfig& c);

double initial_wigner(const InitialState& s, const PhysicalConfig& c, double q, double p);

// W(q,p;t) for a Gaussian-family initial state, with the (r,s) integral done
// by completing the square. Construct once per t and evaluate on a grid.
class WignerEvolution {
public:
    WignerEvolution(const WignerTransform& w, const PhysicalConfig& c, double t);
    double operator()(double q, double p) const;
    // Same value by direct 2-D quadrature over (r,s); slow, for cross-checks.
    double by_quadrature(double q, double p) const;

private:
    WignerTransform w_;
    double hbar_;
    double l_[2][2];  // (Q,P) = L (r,s)
    double a_[2][2];  // fluctuation quadratic form over hbar^2
};

double evolve_wigner(const InitialState& s, const PhysicalConfig& c, double t, double q, double p);

// Kernel P(q,p;q',p';t) mapping W(.;0) to W(.;t).
double transition_probability(const PhysicalConfig& c, double t, double q, double p, double q0,
                              double p0);

struct SpatialDensity {
    double t{0.0};
    double mean{0.0};
    double variance{0.0};
    double normalization{0.0};  // int P dx by quadrature
    double hbar{1.0};
    std::vector<GaussianTerm> terms;  // in s: coef exp(-n s^2/2 + kappa s), k_q = kappa, m_qq = n

    double operator()(double x) const;
};

SpatialDensity spatial_density(const InitialState& s, const PhysicalConfig& c, double t);

// <Delta x^2(t)> of one packet of the state (thermal variant for thermal states).
double variance_report(const InitialState& s, const PhysicalConfig& c, double t);

enum class FitLaw { ExpT3, GaussT2 };

struct AttenuationResult {
    double t{0.0};
    double a{1.0};
    std::optional<double> tau_d;
    FitLaw fit_law{FitLaw::ExpT3};
};

// Interference attenuation exp{-<X^2>_eff d^2 / (8 sigma^2 <Delta x^2>)} of a pair state.
AttenuationResult attenuation(const InitialState& s, const PhysicalConfig& c, double t);

struct DecoherenceFit {
    FitLaw law{FitLaw::ExpT3};
    double tau_d{0.0};
    double t_lo{0.0}, t_hi{0.0};
    double max_residual{0.0};  // of the fitted -log a, relative
};

// ExpT3 (-log a = t/tau_d, narrow non-thermal pair) or GaussT2
// (-log a = t^2/tau_d^2, thermal pair), fitted on [t_lo, t_hi] with the
// next-order corrections as free parameters. t_hi = 0 picks the default
// window. Throws FitWindowError outside the law's validity.
DecoherenceFit fit_decoherence_time(const InitialState& s, const PhysicalConfig& c, FitLaw law,
                                    double t_lo = 0.0, double t_hi = 0.0);

double equilibrium_wigner(const PhysicalConfig& c, double q, double p);

struct ExactReference {
    double t{0.0};
    double commutator{0.0};  // C(t), [x(t), x(0)] = -i C
    double s{0.0};
    double w_sq{0.0};
    std::optional<double> a_exact;  // pair states only
};

// Successive-measurement reference: w^2 = sigma^2 + s + C^2/4 sigma^2 and
// a = exp{-s d^2/(8 sigma^2 w^2)}.
ExactReference exact_reference(const InitialState& s, const PhysicalConfig& c, double t);

// The normalized density for the reference, Gaussian of variance w^2 about x0.
double exact_reference_density(const InitialState& s, const ExactReference& r, double x);

}  // namespace hpz
