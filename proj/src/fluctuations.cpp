#include "hpz/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hpz/bath.hpp"
#include "hpz/error.hpp"
#include "hpz/green.hpp"
#include "hpz/quadrature.hpp"
#include "hpz/special.hpp"

namespace hpz {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const quad::Tolerance kTol{1e-10, 1e-15};

double upper_limit(const PhysicalConfig& c) {
    return c.has_cutoff() ? c.bath.cutoff : std::numeric_limits<double>::infinity();
}

// Im alpha(w) coth(hbar w / 2kT)
double im_alpha_coth(const PhysicalConfig& c, double w) {
    return response_imag(c, w) * thermal_weight(c, w);
}

// Whether int^inf w^order Im alpha coth dw diverges at high frequency.
// Im alpha ~ zeta/(m^2 w^3) (Ohmic) or ~ zeta/(m^2 tau^2 w^5) (SRT); the
// zero-point part of coth contributes w^0, the classical part 1/w.
bool moment_diverges(const PhysicalConfig& c, int order) {
    const int decay = (c.is_ohmic() ? 3 : 5) + (c.thermal.regime == Regime::HighTemperature ? 1 : 0);
    return order - decay >= -1;
}

// Breakpoints on [0, upper]; for an infinite upper limit they stop where the
// integrands are in their power-law tails.
std::vector<double> low_frequency_points(const PhysicalConfig& c, double upper) {
    const auto features = spectral_features(c);
    if (!std::isfinite(upper)) upper = 100.0 * *std::max_element(features.begin(), features.end());
    auto pts = quad::spectral_breakpoints(upper, features);
    if (!c.free_particle()) {
        // resolve the resonance; its width is about zeta/m
        const double w0 = std::sqrt(c.K() / c.m()), width = c.zeta() / c.m();
        for (double k : {0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0})
            for (double sgn : {-1.0, 1.0}) {
                const double w = w0 + sgn * k * width;
                if (w > 0.0 && w < upper) pts.push_back(w);
            }
    }
    // geometric points up to a finite cutoff keep panels within a decade
    for (double w = 2.0 * pts[pts.size() - 2]; w < upper; w *= 2.0) pts.push_back(w);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// (2 hbar / pi) int_0^cutoff w^order Im alpha coth dw
RegularizedValue spectral_moment(const PhysicalConfig& c, int order) {
    RegularizedValue out;
    out.divergent = moment_diverges(c, order);
    out.cutoff = c.bath.cutoff;
    if (out.divergent && !c.has_cutoff()) {
        out.value = kNaN;
        return out;
    }
    const double upper = upper_limit(c);
    auto f = [&](double w) {
        // exp_sinh probes w ~ 1e100+, where w^order overflows against an underflowed Im alpha
        const double v = std::pow(w, order) * im_alpha_coth(c, w);
        return std::isfinite(v) ? v : 0.0;
    };
    const auto pts = low_frequency_points(c, upper);
    double v = quad::integrate_panels(f, pts, kTol);
    if (!std::isfinite(upper)) v += quad::integrate_to_infinity(f, pts.back(), kTol);
    out.value = 2.0 * c.hbar() / M_PI * v;
    return out;
}

// Ohmic, closed forms in terms of I(x)
DisplacementEval msd_ohmic_zero(const PhysicalConfig& c, double t) {
    const double m = c.m(), zeta = c.zeta(), r = zeta / m;
    const double k = 2.0 * c.hbar() / (M_PI * zeta);
    DisplacementEval out;
    out.t = t;
    out.s2_at_0.divergent = true;
    out.s2_at_0.cutoff = c.bath.cutoff;
    out.s2_at_0.value = c.has_cutoff()
                            ? c.hbar() * zeta / (M_PI * m * m) *
                                  std::log1p(m * m * c.bath.cutoff * c.bath.cutoff / (zeta * zeta))
                            : kNaN;
    out.s4_at_0 = spectral_moment(c, 4);
    if (t == 0.0) {
        out.s2 = out.s2_at_0.value;
        return out;
    }
    const double x = r * t;
    out.s = k * special_I(x);
    out.s1 = k * r * special_I_prime(x);
    out.s2 = k * r * r * special_I_second(x);
    return out;
}

// SRT at zero temperature: s = (2 hbar / pi zeta) [g+^2 I(g- t) - g-^2 I(g+ t)] / (g+^2 - g-^2)
DisplacementEval msd_srt_zero(const PhysicalConfig& c, double t) {
    const auto g = gamma_pm(c);
    const double gp2 = g.plus * g.plus, gm2 = g.minus * g.minus;
    const double k = 2.0 * c.hbar() / (M_PI * c.zeta() * (gp2 - gm2));
    DisplacementEval out;
    out.t = t;
    out.s2_at_0 = {k * gp2 * gm2 * std::log(g.plus / g.minus), false, c.bath.cutoff};
    out.s4_at_0 = spectral_moment(c, 4);
    if (t == 0.0) {
        out.s2 = out.s2_at_0.value;
        return out;
    }
    const double xm = g.minus * t, xp = g.plus * t;
    out.s = k * (gp2 * special_I(xm) - gm2 * special_I(xp));
    out.s1 = k * (gp2 * g.minus * special_I_prime(xm) - gm2 * g.plus * special_I_prime(xp));
    out.s2 = k * gp2 * gm2 * (special_I_second(xm) - special_I_second(xp));
    return out;
}

DisplacementEval msd_quadrature(const PhysicalConfig& c, double t) {
    DisplacementEval out;
    out.t = t;
    out.s2_at_0 = spectral_moment(c, 2);
    out.s4_at_0 = spectral_moment(c, 4);
    if (t == 0.0) {
        out.s2 = out.s2_at_0.value;
        return out;
    }
    const double upper = upper_limit(c);
    const auto features = spectral_features(c);
    const double k = 2.0 * c.hbar() / M_PI;
    out.s = k * quad::integrate_split(
                    [&](double w) {
                        const double h = std::sin(0.5 * w * t);
                        return im_alpha_coth(c, w) * 2.0 * h * h;
                    },
                    [&](double w) { return im_alpha_coth(c, w); },
                    [&](double w) { return -im_alpha_coth(c, w) * std::cos(w * t); }, t, upper, features, kTol, oscillation_head_scale(c, t));
    out.s1 = k * quad::integrate_oscillatory(
                     [&](double w) { return im_alpha_coth(c, w) * w * std::sin(w * t); }, t, upper,
                     features, kTol, quad::Oscillation::Pure, oscillation_head_scale(c, t));
    out.s2 = k * quad::integrate_oscillatory(
                     [&](double w) { return im_alpha_coth(c, w) * w * w * std::cos(w * t); }, t,
                     upper, features, kTol, quad::Oscillation::Pure, oscillation_head_scale(c, t));
    return out;
}

// x - 2(1 - e^{-x}) + (1 - e^{-2x})/2, cancellation-free
double squared_green_integral(double x) {
    if (x < 0.5) {
        double sum = 0.0, term = x * x / 2.0;  // (-x)^2 / 2!
        double pow2 = 2.0;                      // 2^{n-1} at n = 2
        for (int n = 3; n < 40; ++n) {
            term *= -x / n;
            pow2 *= 2.0;
            const double add = term * (2.0 - pow2);
            sum += add;
            if (std::abs(add) < 1e-17 * std::abs(sum)) break;
        }
        return sum;
    }
    return x + 2.0 * std::expm1(-x) - 0.5 * std::expm1(-2.0 * x);
}

XMoments x_moments_ohmic_high(const PhysicalConfig& c, double t) {
    // <X^2> = 2 zeta kT int_0^t G^2, and likewise for Xdot; <XXdot+XdotX> = 2 zeta kT G^2
    const double m = c.m(), zeta = c.zeta(), kT = c.kT(), r = zeta / m, x = r * t;
    const double g = -std::expm1(-x) / zeta;
    XMoments out;
    out.t = t;
    out.xx = 2.0 * kT * m * squared_green_integral(x) / (zeta * zeta);
    out.vv = -kT / m * std::expm1(-2.0 * x);
    out.xv_sym = 2.0 * zeta * kT * g * g;
    return out;
}

XMoments x_moments_ohmic_zero(const PhysicalConfig& c, double t) {
    const auto d = msd(c, t);
    const double s20 = d.s2_at_0.require("x_moments");
    const auto gr = green(c, t);
    const double m = c.m(), G = gr.g, Gd = gr.g1;
    XMoments out;
    out.t = t;
    out.cutoff_dependent = true;
    out.xx = d.s - m * G * d.s1 + 0.5 * m * m * G * G * s20;
    out.vv = 0.5 * (1.0 + m * m * Gd * Gd) * s20 - m * Gd * d.s2;
    out.xv_sym = (1.0 - m * Gd) * d.s1 - m * G * d.s2 + m * m * G * Gd * s20;
    return out;
}

// Ohmic oscillator: X = x_s(t) - a x_s(0) - b xdot_s(0) with a = m Gdot + zeta G,
// b = m G, expressed through the stationary correlation
// C(t) = (hbar/pi) int Im alpha coth cos(wt) dw.
XMoments x_moments_ohmic_oscillator(const PhysicalConfig& c, double t) {
    const double m = c.m(), zeta = c.zeta();
    const auto v0 = spectral_moment(c, 2);
    const double V0 = 0.5 * v0.require("x_moments");
    const double C0 = 0.5 * spectral_moment(c, 0).value;
    const double upper = upper_limit(c);
    const auto features = spectral_features(c);
    const double k = c.hbar() / M_PI;
    const double C = k * quad::integrate_oscillatory(
                             [&](double w) { return im_alpha_coth(c, w) * std::cos(w * t); }, t,
                             upper, features, kTol, quad::Oscillation::Pure, oscillation_head_scale(c, t));
    const double Cd = -k * quad::integrate_oscillatory(
                               [&](double w) { return im_alpha_coth(c, w) * w * std::sin(w * t); }, t,
                               upper, features, kTol, quad::Oscillation::Pure, oscillation_head_scale(c, t));
    const double Cdd = -k * quad::integrate_oscillatory(
                                [&](double w) { return im_alpha_coth(c, w) * w * w * std::cos(w * t); },
                                t, upper, features, kTol, quad::Oscillation::Pure, oscillation_head_scale(c, t));
    const auto gr = green(c, t);
    const double a = m * gr.g1 + zeta * gr.g, b = m * gr.g;
    const double ad = m * gr.g2 + zeta * gr.g1, bd = m * gr.g1;
    XMoments out;
    out.t = t;
    out.cutoff_dependent = v0.divergent;
    out.xx = C0 * (1.0 + a * a) + b * b * V0 - 2.0 * a * C + 2.0 * b * Cd;
    out.vv = V0 * (1.0 + bd * bd) + ad * ad * C0 - 2.0 * ad * Cd + 2.0 * bd * Cdd;
    out.xv_sym = 2.0 * (bd * Cd - ad * C - a * Cd + a * ad * C0 + b * Cdd + b * bd * V0);
    return out;
}

}  // namespace

double RegularizedValue::require(const char* who) const {
    if (divergent && !std::isfinite(value))
        throw DivergenceError(std::string(who) + ": " + kZeroPointDivergence +
                              " (set a frequency cutoff)");
    return value;
}

DisplacementEval msd(const PhysicalConfig& c, double t) {
    if (t < 0.0) throw DomainError("msd: t < 0");
    if (c.free_particle() && c.thermal.regime == Regime::HighTemperature && c.is_ohmic()) {
        const double m = c.m(), zeta = c.zeta(), kT = c.kT(), r = zeta / m;
        const double em1 = -std::expm1(-r * t), e = std::exp(-r * t);
        DisplacementEval out;
        out.t = t;
        // t - (1 - e^{-rt})/r written without cancellation
        const double rt = r * t;
        const double lin = rt < 1e-3 ? t * rt * (0.5 - rt / 6.0 + rt * rt / 24.0) : t - em1 / r;
        out.s = 2.0 * kT / zeta * lin;
        out.s1 = 2.0 * kT / zeta * em1;
        out.s2 = 2.0 * kT / m * e;
        out.s2_at_0 = {2.0 * kT / m, false, c.bath.cutoff};
        out.s4_at_0 = spectral_moment(c, 4);
        return out;
    }
    if (c.free_particle() && c.thermal.regime == Regime::ZeroTemperature) {
        if (c.is_ohmic()) return msd_ohmic_zero(c, t);
        const auto g = gamma_pm(c);
        if (g.plus - g.minus > 1e-3 * g.plus) return msd_srt_zero(c, t);
    }
    return msd_quadrature(c, t);
}

XMoments x_moments_spectral(const PhysicalConfig& c, double t) {
    if (t < 0.0) throw DomainError("x_moments: t < 0");
    if (!c.free_particle())
        throw UnsupportedError("x_moments_spectral: requires the free-particle Green function");
    const bool zero_point = c.thermal.regime != Regime::HighTemperature;
    if (c.is_ohmic() && zero_point && !c.has_cutoff())
        throw DivergenceError(std::string("x_moments: ") + kZeroPointDivergence +
                              " (set a frequency cutoff)");
    XMoments out;
    out.t = t;
    out.cutoff_dependent = c.has_cutoff();
    if (t == 0.0) return out;
    const ClosedGreen gf(c);
    const double upper = upper_limit(c);
    const auto features = spectral_features(c);
    // (1/pi) Re mu(w) hbar w coth(hbar w/2kT)
    auto weight = [&](double w) {
        return memory_transform(c, {w, 0.0}).real() * c.hbar() * w * thermal_weight(c, w) / M_PI;
    };
    // Beyond the spectral features split |P + Q e^{iwt}|^2 into a smooth and a
    // purely oscillating part so the tail needs no block summation.
    auto moment = [&](int i, int j, double factor) {
        return factor * quad::integrate_split(
                            [&](double w) {
                                return weight(w) *
                                       (gf.finite_transform(w, t, i) * std::conj(gf.finite_transform(w, t, j))).real();
                            },
                            [&](double w) {
                                const auto [pi, qi] = gf.transform_parts(w, t, i);
                                const auto [pj, qj] = gf.transform_parts(w, t, j);
                                return weight(w) * (pi * std::conj(pj) + qi * std::conj(qj)).real();
                            },
                            [&](double w) {
                                const auto [pi, qi] = gf.transform_parts(w, t, i);
                                const auto [pj, qj] = gf.transform_parts(w, t, j);
                                const std::complex<double> e{std::cos(w * t), std::sin(w * t)};
                                return weight(w) * (pi * std::conj(qj) * std::conj(e) + qi * std::conj(pj) * e).real();
                            },
                            t, upper, features, kTol, oscillation_head_scale(c, t));
    };
    out.xx = moment(0, 0, 1.0);
    out.vv = moment(1, 1, 1.0);
    out.xv_sym = moment(0, 1, 2.0);
    return out;
}

XMoments x_moments(const PhysicalConfig& c, double t) {
    if (t < 0.0) throw DomainError("x_moments: t < 0");
    if (!c.free_particle()) {
        if (!c.is_ohmic())
            throw UnsupportedError("x_moments: spring_constant > 0 is supported for the Ohmic bath only");
        if (t == 0.0) return {};
        return x_moments_ohmic_oscillator(c, t);
    }
    if (c.is_ohmic() && c.thermal.regime == Regime::HighTemperature) return x_moments_ohmic_high(c, t);
    if (c.is_ohmic() && c.thermal.regime == Regime::ZeroTemperature) {
        if (t == 0.0) {
            XMoments out;
            out.cutoff_dependent = true;
            return out;
        }
        return x_moments_ohmic_zero(c, t);
    }
    return x_moments_spectral(c, t);
}

double thermal_packet_xx(const PhysicalConfig& c, double t) {
    if (!(c.kT() > 0.0)) throw DomainError("thermal_packet_xx: requires T > 0");
    const double g = green(c, t).g;
    return x_moments(c, t).xx + c.m() * c.kT() * g * g;
}

CovarianceMatrix covariance_from(const PhysicalConfig& c, const XMoments& x) {
    const double m = c.m();
    CovarianceMatrix a{m * m * x.vv, 0.5 * m * x.xv_sym, x.xx};
    const double scale = std::abs(a.a_pp * a.a_qq);
    if (a.a_pp < 0.0 || a.a_qq < 0.0 || a.det() < -1e-8 * scale)
        throw ConsistencyError("covariance: matrix is not positive semi-definite (det = " +
                               std::to_string(a.det()) + ")");
    return a;
}

CovarianceMatrix covariance(const PhysicalConfig& c, double t) {
    if (!(t > 0.0)) throw DomainError("covariance: requires t > 0");
    return covariance_from(c, x_moments(c, t));
}

EquilibriumMoments equilibrium_moments(const PhysicalConfig& c) {
    if (c.free_particle())
        throw DomainError("equilibrium_moments: a free particle has no equilibrium position variance");
    EquilibriumMoments out;
    out.x_sq = 0.5 * spectral_moment(c, 0).require("equilibrium_moments");
    out.v_sq = 0.5 * spectral_moment(c, 2).require("equilibrium_moments");
    return out;
}

DivergenceFit divergence_probe(const PhysicalConfig& c, double t_probe,
                               const std::vector<double>& cutoffs) {
    if (c.thermal.regime != Regime::ZeroTemperature)
        throw DomainError("divergence_probe: requires the zero-temperature regime");
    if (cutoffs.size() < 2) throw DomainError("divergence_probe: needs at least two cutoffs");
    DivergenceFit fit;
    fit.cutoffs = cutoffs;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double wc : cutoffs) {
        if (!(wc > 0.0)) throw DomainError("divergence_probe: cutoffs must be positive");
        PhysicalConfig cc = c;
        cc.bath.cutoff = wc;
        const double v = x_moments_spectral(cc, t_probe).xx;
        fit.xx.push_back(v);
        const double x = std::log(wc);
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
    }
    const double n = static_cast<double>(cutoffs.size());
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double lo = fit.xx.front(), hi = lo, biggest = 0.0;
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        const double r = fit.xx[i] - (fit.intercept + fit.slope * std::log(cutoffs[i]));
        fit.max_residual = std::max(fit.max_residual, std::abs(r));
        lo = std::min(lo, fit.xx[i]);
        hi = std::max(hi, fit.xx[i]);
        biggest = std::max(biggest, std::abs(fit.xx[i]));
    }
    if (fit.max_residual > 0.05 * (hi - lo) + 1e-3 * biggest)
        throw ConsistencyError("divergence_probe: <X^2> is not linear in log(cutoff); residual " +
                               std::to_string(fit.max_residual));
    return fit;
}

}  // namespace hpz
