#pragma once

namespace hpz {

inline constexpr double kEulerGamma = 0.57721566490153286061;

// I(x) = int_0^inf dy x^2 (1 - cos y) / (y (y^2 + x^2)),  x >= 0.
//      = log x + gamma - (1/2)[e^{-x} Ei(x) + e^{x} Ei(-x)].
double special_I(double x);
// dI/dx
double special_I_prime(double x);
// d^2I/dx^2 = I(x) - log x - gamma; diverges like -log x at the origin.
double special_I_second(double x);

namespace special_detail {
// Branches exposed for crossover checks.
double I_series(double x);
double I_closed(double x);
double I_asymptotic(double x);
double I_prime_series(double x);
double I_prime_closed(double x);
double I_prime_asymptotic(double x);
inline constexpr double kSeriesLimit = 2.0;
inline constexpr double kAsymptoticStart = 40.0;
}  // namespace special_detail

}  // namespace hpz
