// Acceptance criteria, one line each. Exit status 1 if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "hpz/error.hpp"
#include "hpz/evolution.hpp"
#include "hpz/fluctuations.hpp"
#include "hpz/green.hpp"
#include "hpz/oracle/discrete_bath.hpp"
#include "hpz/oracle/master_equation.hpp"
#include "hpz/quadrature.hpp"
#include "scenario.hpp"

#ifndef HPZ_CONFIG_DIR
#define HPZ_CONFIG_DIR "configs"
#endif

using namespace hpz;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

cli::ScenarioSpec scenario(const char* name) {
    return cli::load_scenario(std::string(HPZ_CONFIG_DIR) + "/" + name + ".json");
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome green_ode() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_ohmic = 0.0, worst_srt = 0.0;
    const auto ohmic = scenario("ohmic_high_t").physical, srt = scenario("srt_coefficients").physical;
    for (int k = 1; k <= 400; ++k) {
        const double t = 10.0 * k / 400.0;  // m = zeta = 1
        worst_ohmic = std::max(worst_ohmic, green_ode_residual(ohmic, t));
        worst_srt = std::max(worst_srt, green_ode_residual(srt, t));
    }
    const double secs = elapsed(t0);
    return {worst_ohmic < 1e-8 && worst_srt < 1e-8 && secs < 1.0,
            "max residual Ohmic " + fmt("%.2e", worst_ohmic) + ", SRT " + fmt("%.2e", worst_srt) + " (< 1e-8) in " +
                fmt("%.2f", secs) + " s (< 1 s)"};
}

Outcome ohmic_limit() {
    const auto base = scenario("srt_coefficients").physical;
    auto ohmic = base;
    ohmic.bath.kind = BathKind::Ohmic;
    ohmic.bath.relaxation_time = 0.0;
    bool pass = true;
    std::string detail;
    for (double tau : {1e-2, 1e-3, 1e-4}) {
        auto c = base;
        c.bath.relaxation_time = tau;
        double worst = 0.0;
        // resolve the initial layer of width tau and the whole range
        for (int k = 0; k <= 2000; ++k) worst = std::max(worst, std::abs(green(c, 10.0 * k / 2000.0).g - green(ohmic, 10.0 * k / 2000.0).g));
        for (int k = 0; k <= 400; ++k) {
            const double t = tau * 1e-2 * std::pow(1e4, k / 400.0);
            worst = std::max(worst, std::abs(green(c, t).g - green(ohmic, t).g));
        }
        const double bound = 2.0 * tau * c.zeta() / c.m();
        pass = pass && worst <= bound;
        detail += "tau " + fmt("%.0e", tau) + ": " + fmt("%.3e", worst) + " <= " + fmt("%.0e", bound) + "; ";
    }
    auto c = base;
    c.bath.relaxation_time = 1e-3;
    std::vector<double> pts{0.0};
    for (double t = 1e-5; t < 40.0; t *= 2.0) pts.push_back(t);
    pts.push_back(40.0);
    const double integral =
        quad::integrate_panels([&](double t) { return local_coefficients(c, t).omega_sq.value; }, pts, {1e-10, 1e-14});
    const double rel = std::abs(integral / (c.zeta() / c.m()) - 1.0);
    pass = pass && rel < 0.01;
    detail += "int Omega^2 dt = " + fmt("%.6f", integral) + " (zeta/m = 1, rel " + fmt("%.1e", rel) + ")";
    return {pass, detail};
}

Outcome srt_endpoints() {
    const auto c = scenario("srt_coefficients").physical;
    const auto roots = gamma_pm(c);
    const auto at0 = local_coefficients(c, 0.0);
    const auto late = local_coefficients(c, 30.0 / roots.minus);
    const double e0 = std::abs(at0.two_gamma);
    const double e1 = std::abs(at0.omega_sq.value / (roots.plus * roots.minus) - 1.0);
    const double e2 = std::abs(late.two_gamma / roots.minus - 1.0);
    return {e0 < 1e-10 && e1 < 1e-10 && e2 < 1e-6,
            "|2Gamma(0)| " + fmt("%.1e", e0) + ", Omega^2(0)/(g+ g-) - 1 " + fmt("%.1e", e1) +
                ", 2Gamma(30/g-)/g- - 1 " + fmt("%.1e", e2)};
}

Outcome high_t_consistency() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto spec = scenario("ohmic_exact_hot");
    auto classical = spec.physical;
    classical.thermal.regime = Regime::HighTemperature;
    double worst = 0.0;
    for (double t : spec.time.points()) worst = std::max(worst, std::abs(msd(spec.physical, t).s / msd(classical, t).s - 1.0));
    const double secs = elapsed(t0);
    return {worst < 0.01 && secs < 10.0,
            "kT = 100: max |s_exact/s_high - 1| on [0.1, 10] = " + fmt("%.2e", worst) + " (< 1e-2) in " +
                fmt("%.2f", secs) + " s"};
}

// Known infeasible at zeta t/m = 0.01: the exact variance carries O(zeta t/m)
// corrections of relative size >= (zeta t/m)/3. Reported, not relaxed.
Outcome short_time_laws() {
    const auto spec = scenario("short_time");
    const auto& c = spec.physical;
    const double sigma = spec.state.sigma, m = c.m(), hbar = c.hbar();
    auto deviation = [&](double t) {
        const double pure = sigma * sigma + hbar * hbar * t * t / (4 * m * m * sigma * sigma);
        const double thermal = pure + c.kT() * t * t / m;
        const double a = std::abs(variance_report(spec.state, c, t) / pure - 1.0);
        const double b = std::abs(variance_report(InitialState::gaussian(spec.state.x0, sigma, true), c, t) / thermal - 1.0);
        return std::max(a, b);
    };
    const double at_1e2 = deviation(1e-2 * m / c.zeta()), at_1e4 = deviation(1e-4 * m / c.zeta());
    return {at_1e2 < 1e-3, "max rel deviation at zeta t/m = 0.01: " + fmt("%.2e", at_1e2) +
                               " (criterion 1e-3; the leading correction -2 zeta t/m of sigma^2 alone is 2e-2); at "
                               "zeta t/m = 1e-4: " + fmt("%.2e", at_1e4)};
}

Outcome decoherence_times() {
    const auto cold = scenario("cat_cold"), hot = scenario("cat_thermal"), flat = scenario("cat_plateau");
    const auto& cc = cold.physical;
    const double d = cold.state.d;
    const double law_cold = 3.0 * cc.hbar() * cc.hbar() / (cc.zeta() * cc.kT() * d * d);
    const double fit_cold = fit_decoherence_time(cold.state, cc, FitLaw::ExpT3).tau_d;
    const auto& ch = hot.physical;
    const double law_hot = std::sqrt(8.0) * hot.state.sigma * hot.state.sigma / (std::sqrt(ch.kT() / ch.m()) * hot.state.d);
    const double fit_hot = fit_decoherence_time(hot.state, ch, FitLaw::GaussT2).tau_d;
    const double a = attenuation(flat.state, flat.physical, flat.time.t_end).a;
    const double plateau = std::exp(-flat.state.d * flat.state.d / (8.0 * flat.state.sigma * flat.state.sigma));
    const double e1 = std::abs(fit_cold / law_cold - 1.0), e2 = std::abs(fit_hot / law_hot - 1.0),
                 e3 = std::abs(a - plateau);
    return {e1 < 0.02 && e2 < 0.02 && e3 < 1e-3,
            "cold tau_d " + fmt("%.5f", fit_cold) + " vs " + fmt("%.5f", law_cold) + " (" + fmt("%.1e", e1) +
                "), thermal " + fmt("%.5f", fit_hot) + " vs " + fmt("%.5f", law_hot) + " (" + fmt("%.1e", e2) +
                "), plateau a(" + fmt("%g", flat.time.t_end) + ") - e^{-d^2/8s^2} = " + fmt("%.1e", e3)};
}

Outcome zero_point_divergence() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (const char* name : {"divergence_ohmic", "divergence_srt"}) {
        const auto spec = scenario(name);
        std::vector<double> cutoffs;
        for (const auto& x : spec.divergence.at("cutoffs")) cutoffs.push_back(x.get<double>());
        const auto fit = divergence_probe(spec.physical, spec.divergence.at("t_probe").get<double>(), cutoffs);
        const double expected = spec.physical.hbar() / (M_PI * spec.physical.zeta());
        const double rel = std::abs(fit.slope / expected - 1.0);
        pass = pass && rel < 0.02 && cutoffs.back() / cutoffs.front() >= 100.0;
        detail += std::string(spec.physical.is_ohmic() ? "Ohmic" : "SRT") + " slope " + fmt("%.6f", fit.slope) +
                  " (rel " + fmt("%.1e", rel) + "); ";
    }
    const double secs = elapsed(t0);
    pass = pass && secs < 30.0;
    return {pass, detail + "hbar/(pi zeta) = 0.318310, cutoffs 1e2..1e4, " + fmt("%.2f", secs) + " s"};
}

Outcome pde_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto spec = scenario("srt_high_t");
    const double t = spec.physical.m() / spec.physical.zeta();
    const auto grid = oracle::default_grid(spec.physical, spec.state, t, 256, 256);
    const auto sol = oracle::integrate_master_equation(spec.physical, spec.state, grid, t);
    const double exact = variance_report(spec.state, spec.physical, t);
    const double rel = std::abs(sol.moments.var_x / exact - 1.0);
    const double l1 = oracle::density_l1_distance(sol, spatial_density(spec.state, spec.physical, t));
    const double secs = elapsed(t0);
    return {rel < 0.01 && l1 < 1e-2 && secs < 120.0,
            "<x^2>(1) " + fmt("%.8f", sol.moments.var_x) + " vs " + fmt("%.8f", exact) + " (rel " + fmt("%.1e", rel) +
                "), L1 " + fmt("%.2e", l1) + ", 256^2, " + fmt("%.1f", secs) +
                " s (moment-consistent diffusion; the force-correlation f, h give 8% low)"};
}

Outcome mc_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto spec = scenario("ohmic_mc");
    const auto& c = spec.physical;
    const auto bath = oracle::build_discrete_bath(c, spec.validate.at("modes").get<std::size_t>(),
                                                  spec.validate.at("bath_cutoff").get<double>());
    oracle::McOptions opt;
    opt.samples = spec.validate.at("samples").get<std::size_t>();
    opt.seed = spec.seed.value_or(1);
    const double t = spec.time.t_end;
    const auto p = oracle::mc_estimate(c, bath, spec.state, {t}, opt).points.front();
    const double xx = x_moments(c, t).xx, var = variance_report(spec.state, c, t);
    const double z1 = std::abs(p.xx - xx) / p.xx_se, z2 = std::abs(p.var_x - var) / p.var_x_se;
    const auto sc = oracle::mc_error_scaling(c, bath, t, {64, 256, 1024, 4096}, 96, opt.seed + 1);
    const double secs = elapsed(t0);
    return {z1 < 3.0 && z2 < 3.0 && sc.exponent >= -0.55 && sc.exponent <= -0.45 && secs < 120.0,
            "<X^2(1)> " + fmt("%.6f", p.xx) + " +- " + fmt("%.6f", p.xx_se) + " vs " + fmt("%.6f", xx) + " (" +
                fmt("%.2f", z1) + " SE), variance " + fmt("%.6f", p.var_x) + " vs " + fmt("%.6f", var) + " (" +
                fmt("%.2f", z2) + " SE), exponent " + fmt("%.3f", sc.exponent) + ", N = 1e5, J = 400, " +
                fmt("%.1f", secs) + " s"};
}

Outcome reference() {
    const auto spec = scenario("reference_ohmic");
    const auto& c = spec.physical;
    double worst_c = 0.0;
    for (double t : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0})
        worst_c = std::max(worst_c, std::abs(exact_reference(spec.state, c, t).commutator - c.hbar() * green(c, t).g));
    // short-time forms: thermal spread and the t << m/zeta attenuation
    const double m = c.m(), kT = c.kT(), hbar = c.hbar(), sig2 = spec.state.sigma * spec.state.sigma,
                 d2 = spec.state.d * spec.state.d;
    double worst_w = 0.0, worst_a = 0.0;
    for (double t : spec.time.points()) {
        if (!(c.zeta() * t / m < 0.01)) continue;
        const auto r = exact_reference(spec.state, c, t);
        const double w_sq = sig2 + hbar * hbar * t * t / (4 * m * m * sig2) + kT * t * t / m;
        const double log_a = -kT / m * t * t * d2 / (8.0 * (sig2 * sig2 + sig2 * kT / m * t * t + hbar * hbar * t * t / (4 * m * m)));
        worst_w = std::max(worst_w, std::abs(r.w_sq / w_sq - 1.0));
        worst_a = std::max(worst_a, std::abs(std::log(*r.a_exact) / log_a - 1.0));
    }
    return {worst_c < 1e-6 && worst_w < 0.01 && worst_a < 0.01,
            "max |C - hbar G| " + fmt("%.1e", worst_c) + "; zeta t/m < 0.01: w^2 vs short-time thermal spread " +
                fmt("%.1e", worst_w) + ", log a_exact vs short-time thermal attenuation " + fmt("%.1e", worst_a)};
}

Outcome equilibrium() {
    const auto spec = scenario("oscillator_weak");
    const auto& c = spec.physical;
    const double w0_sq = c.K() / c.m();
    const auto hot = equilibrium_moments(c);
    auto cold = c;
    cold.thermal.regime = Regime::ZeroTemperature;
    cold.thermal.temperature = 0.0;
    cold.bath.cutoff = 20.0;
    const auto zp = equilibrium_moments(cold);
    const double e1 = std::abs(hot.v_sq / hot.x_sq / w0_sq - 1.0), e2 = std::abs(zp.v_sq / zp.x_sq / w0_sq - 1.0),
                 e3 = std::abs(hot.x_sq / (c.kT() / c.K()) - 1.0);
    return {e1 < 0.02 && e2 < 0.02 && e3 < 0.02,
            "zeta/m w0 = 0.01: <v^2>/<x^2>/w0^2 - 1 = " + fmt("%.1e", e1) + " (high T), " + fmt("%.1e", e2) +
                " (zero T, cutoff 20); <x^2>/(kT/K) - 1 = " + fmt("%.1e", e3)};
}

Outcome normalization() {
    const quad::Tolerance tol{1e-11, 1e-15};
    double worst_w = 0.0, worst_p = 0.0;
    const auto ohmic = scenario("ohmic_high_t").physical, srt = scenario("srt_coefficients").physical;
    for (const auto& c : {ohmic, srt})
        for (const auto& s : {InitialState::gaussian(0.5, 1.0), InitialState::gaussian(0.0, 0.7, true),
                              InitialState::cat(2.0, 1.0), InitialState::cat(3.0, 0.5, true)})
            for (double t : {0.0, 0.5, 3.0}) {
                const WignerEvolution ev(wigner_transform(s, c), c, t);
                const double range = 25.0;
                const double total = quad::integrate(
                    [&](double q) { return quad::integrate([&](double p) { return ev(q, p); }, -range, range, tol); },
                    -range, range, tol);
                worst_w = std::max(worst_w, std::abs(total - 1.0));
                worst_p = std::max(worst_p, std::abs(spatial_density(s, c, t).normalization - 1.0));
            }
    return {worst_w < 1e-8 && worst_p < 1e-8,
            "max |int int W - 1| " + fmt("%.1e", worst_w) + ", max |int P - 1| " + fmt("%.1e", worst_p) +
                " (Gaussian, thermal, cat; Ohmic and SRT; t = 0, 0.5, 3)"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"Green-function ODE residual", green_ode},
        {"Ohmic limit of SRT", ohmic_limit},
        {"SRT coefficient endpoints", srt_endpoints},
        {"high-T regime consistency", high_t_consistency},
        {"short-time variance laws", short_time_laws},
        {"decoherence times and plateau", decoherence_times},
        {"zero-point divergence slope", zero_point_divergence},
        {"PDE oracle", pde_oracle},
        {"MC oracle", mc_oracle},
        {"measurement reference", reference},
        {"equilibrium", equilibrium},
        {"normalization", normalization},
    };
    int failed = 0, index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        Outcome o{false, ""};
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
