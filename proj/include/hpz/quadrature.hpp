#pragma once

#include <functional>
#include <vector>

namespace hpz::quad {

using Integrand = std::function<double(double)>;

struct Tolerance {
    double rel{1e-10};
    double abs{1e-14};
};

// Adaptive Gauss-Kronrod on [a, b].
double integrate(const Integrand& f, double a, double b, Tolerance tol = {});

// Adaptive Gauss-Kronrod over consecutive panels [p0,p1], [p1,p2], ...
double integrate_panels(const Integrand& f, const std::vector<double>& points,
                        Tolerance tol = {});

// Non-oscillatory integrand on [a, inf).
double integrate_to_infinity(const Integrand& f, double a, Tolerance tol = {});

enum class Oscillation {
    Mixed,  // oscillating plus a non-oscillating part (e.g. 1 - cos wt)
    Pure,   // zero mean over each period beyond the spectral features
};

// Integral over [0, upper) of an integrand that oscillates with angular
// period 2 pi / t in omega. `features` are frequencies where the envelope
// changes (decay rates, resonances); below a few times the largest one the
// range is resolved with breakpoints and tiled in half periods. Beyond it a
// Pure integrand is summed in half periods with Wynn's epsilon algorithm; a
// Mixed one in doubling blocks of whole periods, whose sums converge
// geometrically (much more expensive for large t * features). A positive
// `head_scale` replaces the largest feature in sizing that region, for
// features the tail may safely run across (smooth on the scale of a period).
double integrate_oscillatory(const Integrand& f, double t, double upper,
                             const std::vector<double>& features, Tolerance tol = {},
                             Oscillation kind = Oscillation::Mixed, double head_scale = 0.0);

// As integrate_oscillatory, for an integrand that the caller can split, in
// the tail, into smooth + oscillating (pure) parts; f is used near the origin
// where such splits typically cancel.
double integrate_split(const Integrand& f, const Integrand& smooth, const Integrand& oscillating,
                       double t, double upper, const std::vector<double>& features,
                       Tolerance tol = {}, double head_scale = 0.0);

// Wynn epsilon extrapolation of a sequence of partial sums.
double wynn_epsilon(const std::vector<double>& partial_sums);

// Log-spaced breakpoints in (0, upper], refined around each `feature`.
std::vector<double> spectral_breakpoints(double upper, const std::vector<double>& features);

}  // namespace hpz::quad
