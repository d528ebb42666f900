#include "hpz/bath.hpp"

#include <cmath>

#include "hpz/error.hpp"

namespace hpz {

cplx memory_transform(const PhysicalConfig& c, cplx z) {
    if (z.imag() < 0.0)
        throw DomainError("memory_transform: Im z < 0 lies outside the positive-real domain");
    if (c.is_ohmic()) return {c.zeta(), 0.0};
    const cplx i{0.0, 1.0};
    return c.zeta() / (1.0 - i * z * c.tau());
}

TaggedValue memory_kernel(const PhysicalConfig& c, double t) {
    if (t < 0.0) throw DomainError("memory_kernel: t < 0");
    if (c.is_ohmic()) {
        if (t == 0.0) return {0.0, 2.0 * c.zeta(), true};
        return {0.0, 0.0, false};
    }
    return {c.zeta() / c.tau() * std::exp(-t / c.tau()), 0.0, false};
}

cplx response(const PhysicalConfig& c, double w) {
    if (w == 0.0 && c.free_particle())
        throw DomainError("response: free-particle static pole at omega = 0");
    const cplx i{0.0, 1.0};
    const cplx mu = memory_transform(c, cplx{w, 0.0});
    return 1.0 / (-c.m() * w * w - i * w * mu + c.K());
}

double response_imag(const PhysicalConfig& c, double w) {
    // Im alpha = w Re mu / |den|^2 with den = K - m w^2 + w Im mu - i w Re mu
    const double m = c.m(), K = c.K(), zeta = c.zeta();
    double re_mu = zeta, im_mu = 0.0;
    if (!c.is_ohmic()) {
        const double wt = w * c.tau();
        const double d = 1.0 + wt * wt;
        re_mu = zeta / d;
        im_mu = zeta * wt / d;
    }
    const double a = K - m * w * w + w * im_mu;
    const double b = w * re_mu;
    return b / (a * a + b * b);
}

RelaxationRoots gamma_pm(const PhysicalConfig& c) {
    if (c.is_ohmic()) throw UnsupportedError("gamma_pm: requires the single-relaxation-time bath");
    const double x = 4.0 * c.zeta() * c.tau() / c.m();
    if (x > 1.0)
        throw UnsupportedError("gamma_pm: 4 zeta tau / m > 1 gives complex roots (unsupported)");
    const double root = std::sqrt(1.0 - x);
    const double plus = (1.0 + root) / (2.0 * c.tau());
    // product form avoids cancellation as tau -> 0
    const double minus = (2.0 * c.zeta() / c.m()) / (1.0 + root);
    return {plus, minus};
}

cplx response_partial_fraction(const PhysicalConfig& c, cplx z) {
    const auto g = gamma_pm(c);
    const cplx i{0.0, 1.0};
    return (z + i * (g.plus + g.minus)) / (-c.m() * z * (z + i * g.plus) * (z + i * g.minus));
}

double thermal_weight(const PhysicalConfig& c, double w) {
    const double hbar = c.hbar();
    switch (c.thermal.regime) {
        case Regime::HighTemperature: return 2.0 * c.kT() / (hbar * w);
        case Regime::ZeroTemperature: return 1.0;
        case Regime::Exact: break;
    }
    const double kT = c.kT();
    if (kT == 0.0) return 1.0;
    const double x = hbar * w / (2.0 * kT);
    if (x < 1e-4) return 1.0 / x + x / 3.0 - x * x * x / 45.0;
    if (x > 40.0) return 1.0;
    return 1.0 / std::tanh(x);
}

}  // namespace hpz
