#include "hpz/green.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "hpz/error.hpp"
#include "hpz/quadrature.hpp"

namespace hpz {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool degenerate_roots(const RelaxationRoots& g) {
    return (g.plus - g.minus) <= 1e-6 * g.plus;
}

// int_0^t u^power e^{a u} du
std::complex<double> power_exp_integral(std::complex<double> a, double t, int power) {
    const std::complex<double> at = a * t;
    if (std::abs(at) < 0.5) {
        // series in (a t)
        std::complex<double> sum = 0.0, term = 1.0;
        double factorial = 1.0;
        for (int k = 0; k < 30; ++k) {
            if (k > 0) {
                term *= at;
                factorial *= k;
            }
            const std::complex<double> piece =
                power == 0 ? term / (factorial * (k + 1)) : term / (factorial * (k + 2));
            sum += piece;
            if (std::abs(piece) < 1e-18 * std::abs(sum)) break;
        }
        return power == 0 ? sum * t : sum * t * t;
    }
    const std::complex<double> e = std::exp(at);
    if (power == 0) return (e - 1.0) / a;
    return e * (t / a - 1.0 / (a * a)) + 1.0 / (a * a);
}

}  // namespace

std::vector<double> spectral_features(const PhysicalConfig& c) {
    std::vector<double> f{c.zeta() / c.m()};
    if (!c.free_particle()) f.push_back(std::sqrt(c.K() / c.m()));
    if (!c.is_ohmic()) f.push_back(1.0 / c.tau());
    return f;
}

double oscillation_head_scale(const PhysicalConfig& c, double t) {
    double scale = c.zeta() / c.m();
    if (!c.free_particle()) scale = std::max(scale, std::sqrt(c.K() / c.m()));
    if (!c.is_ohmic() && t < 50.0 * c.tau()) scale = std::max(scale, 1.0 / c.tau());
    return scale;
}

bool has_closed_green(const PhysicalConfig& c) { return c.free_particle(); }

ClosedGreen::ClosedGreen(const PhysicalConfig& c) {
    if (!c.free_particle())
        throw UnsupportedError("closed-form Green function requires spring_constant = 0");
    const double m = c.m(), zeta = c.zeta();
    if (c.is_ohmic()) {
        terms_ = {{1.0 / zeta, 0.0, 0}, {-1.0 / zeta, zeta / m, 0}};
        initial_ = {0.0, 1.0 / m, -zeta / (m * m), zeta * zeta / (m * m * m)};
        return;
    }
    // smooth kernel: m G2(0) = 0, m G3(0) = -mu(0) G1(0)
    initial_ = {0.0, 1.0 / m, 0.0, -zeta / (c.tau() * m * m)};
    const auto g = gamma_pm(c);
    if (degenerate_roots(g)) {
        const double r = 0.5 * (g.plus + g.minus);
        // G = [2/r - e^{-r u}(2/r + u)]/m
        terms_ = {{2.0 / (r * m), 0.0, 0}, {-2.0 / (r * m), r, 0}, {-1.0 / m, r, 1}};
        return;
    }
    const double d = g.plus - g.minus;
    terms_ = {{1.0 / zeta, 0.0, 0},
              {-g.plus / (m * g.minus * d), g.minus, 0},
              {g.minus / (m * g.plus * d), g.plus, 0}};
}

double ClosedGreen::derivative(double u, int order) const {
    // Expand about the exact initial derivative so that the exponentials only
    // contribute through expm1; this avoids cancellation at small u.
    const bool anchored = order < static_cast<int>(initial_.size());
    double sum = anchored ? initial_[order] : 0.0;
    for (const auto& term : terms_) {
        const double e = std::exp(-term.rate * u);
        const double em1 = anchored ? std::expm1(-term.rate * u) : e;
        const double lam_pow = std::pow(-term.rate, order);
        if (term.power == 0) {
            sum += term.coef * lam_pow * em1;
        } else {
            double v = lam_pow * u * e;
            if (order > 0) v += order * std::pow(-term.rate, order - 1) * em1;
            sum += term.coef * v;
        }
    }
    return sum;
}

GreenEval ClosedGreen::eval(double t) const {
    return {t, derivative(t, 0), derivative(t, 1), derivative(t, 2), derivative(t, 3)};
}

std::complex<double> ClosedGreen::finite_transform(double w, double t, int order) const {
    const std::complex<double> iw{0.0, w};
    std::complex<double> sum = 0.0;
    for (const auto& term : terms_) {
        const std::complex<double> a = iw - term.rate;
        const double lam_pow = std::pow(-term.rate, order);
        if (term.power == 0) {
            if (lam_pow != 0.0) sum += term.coef * lam_pow * power_exp_integral(a, t, 0);
        } else {
            sum += term.coef * lam_pow * power_exp_integral(a, t, 1);
            if (order > 0)
                sum += term.coef * (order * std::pow(-term.rate, order - 1)) *
                       power_exp_integral(a, t, 0);
        }
    }
    return sum;
}

std::pair<std::complex<double>, std::complex<double>> ClosedGreen::transform_parts(double w, double t,
                                                                                   int order) const {
    const std::complex<double> iw{0.0, w};
    std::complex<double> p = 0.0, q = 0.0;
    for (const auto& term : terms_) {
        const std::complex<double> a = iw - term.rate;
        const double e = std::exp(-term.rate * t);
        const double lam_pow = std::pow(-term.rate, order);
        // int_0^t e^{au} = (e^{at} - 1)/a,  int_0^t u e^{au} = e^{at}(t/a - 1/a^2) + 1/a^2
        std::complex<double> cp0 = -1.0 / a, cq0 = e / a;
        double k0 = 0.0, k1 = 0.0;
        if (term.power == 0) {
            k0 = term.coef * lam_pow;
        } else {
            k1 = term.coef * lam_pow;
            if (order > 0) k0 = term.coef * order * std::pow(-term.rate, order - 1);
            p += k1 / (a * a);
            q += k1 * e * (t / a - 1.0 / (a * a));
        }
        p += k0 * cp0;
        q += k0 * cq0;
    }
    return {p, q};
}

GreenEval green(const PhysicalConfig& c, double t) {
    if (t < 0.0) throw DomainError("green: t < 0");
    if (!c.free_particle()) return green_numerical(c, t);
    const double m = c.m(), zeta = c.zeta();
    if (c.is_ohmic()) {
        // expm1 keeps G accurate for zeta t/m << 1
        const double r = zeta / m;
        const double e = std::exp(-r * t);
        return {t, -std::expm1(-r * t) / zeta, e / m, -r * e / m, r * r * e / m};
    }
    const auto g = gamma_pm(c);
    if (degenerate_roots(g)) return ClosedGreen(c).eval(t);
    const double d = g.plus - g.minus;
    const double em = std::exp(-g.minus * t), ep = std::exp(-g.plus * t);
    const double pre = 1.0 / (m * d);
    GreenEval out;
    out.t = t;
    out.g = (g.plus * g.plus * -std::expm1(-g.minus * t) - g.minus * g.minus * -std::expm1(-g.plus * t)) /
            (m * g.minus * g.plus * d);
    out.g1 = pre * (g.plus * em - g.minus * ep);
    out.g2 = pre * g.plus * g.minus * (ep - em);
    out.g3 = pre * g.plus * g.minus * (g.minus * em - g.plus * ep);
    return out;
}

GreenEval green_numerical(const PhysicalConfig& c, double t) {
    if (t < 0.0) throw DomainError("green_numerical: t < 0");
    if (t == 0.0) return {0.0, 0.0, 1.0 / c.m(), 0.0, kNaN};
    const auto features = spectral_features(c);
    const quad::Tolerance tol{1e-11, 1e-15};
    const double inf = std::numeric_limits<double>::infinity();
    const double k = 2.0 / M_PI;
    GreenEval out;
    out.t = t;
    out.g = k * quad::integrate_oscillatory(
                    [&](double w) { return response_imag(c, w) * std::sin(w * t); }, t, inf,
                    features, tol, quad::Oscillation::Pure, oscillation_head_scale(c, t));
    out.g1 = k * quad::integrate_oscillatory(
                     [&](double w) { return w * response_imag(c, w) * std::cos(w * t); }, t, inf,
                     features, tol, quad::Oscillation::Pure, oscillation_head_scale(c, t));
    out.g2 = -k * quad::integrate_oscillatory(
                      [&](double w) { return w * w * response_imag(c, w) * std::sin(w * t); }, t,
                      inf, features, tol, quad::Oscillation::Pure, oscillation_head_scale(c, t));
    out.g3 = kNaN;
    return out;
}

double green_ode_residual(const PhysicalConfig& c, double t) {
    if (!(t > 0.0)) throw DomainError("green_ode_residual: requires t > 0");
    const GreenEval g = green(c, t);
    double memory = 0.0;
    if (c.is_ohmic()) {
        memory = c.zeta() * g.g1;  // half of the 2 zeta delta at the upper endpoint
    } else {
        const double zt = c.zeta() / c.tau();
        std::optional<ClosedGreen> closed;
        if (c.free_particle()) closed.emplace(c);
        auto integrand = [&](double s) {
            const double gdot = closed ? closed->derivative(s, 1) : green_numerical(c, s).g1;
            return zt * std::exp(-(t - s) / c.tau()) * gdot;
        };
        std::vector<double> pts{0.0};
        for (double x = c.tau(); x < t; x += c.tau()) pts.push_back(x);
        pts.push_back(t);
        memory = quad::integrate_panels(integrand, pts, {1e-13, 1e-16});
    }
    return std::abs(c.m() * g.g2 + memory + c.K() * g.g);
}

LocalCoefficients local_coefficients_from_green(const GreenEval& g) {
    const double den = g.g1 * g.g1 - g.g * g.g2;
    if (!(den > 0.0))
        throw ConsistencyError("local_coefficients: Gdot^2 - G Gddot vanishes (singular)");
    LocalCoefficients out;
    out.t = g.t;
    out.two_gamma = (g.g * g.g3 - g.g1 * g.g2) / den;
    out.omega_sq.value = (g.g2 * g.g2 - g.g1 * g.g3) / den;
    return out;
}

LocalCoefficients local_coefficients(const PhysicalConfig& c, double t) {
    if (t < 0.0) throw DomainError("local_coefficients: t < 0");
    if (!c.free_particle())
        throw UnsupportedError(
            "local_coefficients: not offered for K > 0 (requires a thrice-differentiated "
            "numerical Green function)");
    LocalCoefficients out;
    out.t = t;
    if (c.is_ohmic()) {
        out.two_gamma = c.zeta() / c.m();
        out.omega_sq.value = 0.0;
        if (t == 0.0) {
            out.omega_sq.delta_weight = 2.0 * c.zeta() / c.m();
            out.omega_sq.distributional = true;
        }
        return out;
    }
    const auto g = gamma_pm(c);
    if (degenerate_roots(g)) return local_coefficients_from_green(green(c, t));
    const double s = g.plus + g.minus, d = g.plus - g.minus;
    const double e = std::exp(-d * t), p = std::exp(-g.plus * t);
    // both numerator and denominator of the relaxation form scaled by e^{-gamma_+ t}
    const double den = -s * std::expm1(-d * t) + d * p;
    if (!(den > 0.0))
        throw ConsistencyError("local_coefficients: Gdot^2 - G Gddot vanishes (singular)");
    out.two_gamma = g.minus - d * (s * e - g.plus * p) / den;
    out.omega_sq.value = g.minus * g.plus * d * p / den;
    return out;
}

double force_correlation(const PhysicalConfig& c, double s) {
    if (s < 0.0) s = -s;
    if (c.thermal.regime == Regime::HighTemperature) return c.kT() * memory_kernel(c, s).value;
    if (c.is_ohmic() && !c.has_cutoff())
        throw DivergenceError(std::string("force_correlation: ") + kZeroPointDivergence);
    const double upper = c.has_cutoff() ? c.bath.cutoff : std::numeric_limits<double>::infinity();
    auto integrand = [&](double w) {
        const double re_mu = memory_transform(c, {w, 0.0}).real();
        return re_mu * c.hbar() * w * thermal_weight(c, w) * std::cos(w * s);
    };
    return quad::integrate_oscillatory(integrand, s, upper, spectral_features(c), {1e-10, 1e-14},
                                       quad::Oscillation::Pure, oscillation_head_scale(c, s)) /
           M_PI;
}

DiffusionCoefficients diffusion_coefficients(const PhysicalConfig& c, double t) {
    if (!(t > 0.0))
        throw DomainError("diffusion_coefficients: requires t > 0 (2 Gamma(0) = 0 division guard)");
    if (!c.free_particle())
        throw UnsupportedError("diffusion_coefficients: not offered for K > 0");
    const auto local = local_coefficients(c, t);
    DiffusionCoefficients out;
    out.t = t;
    const double m = c.m();
    if (c.thermal.regime == Regime::HighTemperature) {
        const double kT = c.kT();
        if (c.is_ohmic()) {
            // c_F = 2 zeta kT delta(s), endpoint carries half the weight
            out.xf_sym = 0.0;                       // G(0) = 0
            out.vf_sym = 2.0 * c.zeta() * kT / m;     // Gdot(0) = 1/m
        } else {
            const ClosedGreen gf(c);
            const double zt = c.zeta() / c.tau();
            // e^{-u/tau} is below double precision beyond 40 tau
            const double end = std::min(t, 40.0 * c.tau());
            std::vector<double> pts{0.0};
            for (double x = c.tau(); x < end; x += c.tau()) pts.push_back(x);
            pts.push_back(end);
            const quad::Tolerance tol{1e-13, 1e-16};
            out.xf_sym = 2.0 * kT * quad::integrate_panels(
                [&](double u) { return gf.derivative(u, 0) * zt * std::exp(-u / c.tau()); }, pts, tol);
            out.vf_sym = 2.0 * kT * quad::integrate_panels(
                [&](double u) { return gf.derivative(u, 1) * zt * std::exp(-u / c.tau()); }, pts, tol);
        }
    } else {
        if (c.is_ohmic() && !c.has_cutoff())
            throw DivergenceError(std::string("diffusion_coefficients: ") + kZeroPointDivergence);
        const ClosedGreen gf(c);
        const double upper =
            c.has_cutoff() ? c.bath.cutoff : std::numeric_limits<double>::infinity();
        auto weight = [&](double w) {
            return memory_transform(c, {w, 0.0}).real() * c.hbar() * w * thermal_weight(c, w);
        };
        const quad::Tolerance tol{1e-10, 1e-14};
        out.xf_sym = 2.0 / M_PI *
                     quad::integrate_oscillatory(
                         [&](double w) { return weight(w) * gf.finite_transform(w, t, 0).real(); }, t,
                         upper, spectral_features(c), tol);
        out.vf_sym = 2.0 / M_PI *
                     quad::integrate_oscillatory(
                         [&](double w) { return weight(w) * gf.finite_transform(w, t, 1).real(); }, t,
                         upper, spectral_features(c), tol);
    }
    const double hbar_two_gamma = c.hbar() * local.two_gamma;
    if (hbar_two_gamma == 0.0)
        throw DomainError("diffusion_coefficients: 2 Gamma(t) = 0, f and h undefined");
    out.f = out.xf_sym / hbar_two_gamma;
    out.h = out.vf_sym / hbar_two_gamma;
    return out;
}

}  // namespace hpz
