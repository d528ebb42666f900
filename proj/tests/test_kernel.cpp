#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hpz/error.hpp"
#include "hpz/green.hpp"
#include "hpz/quadrature.hpp"

using namespace hpz;

TEST_CASE("Green function initial conditions") {
    for (const auto& c : {ohmic_config(2.0, 1.0, 1.0), srt_config(2.0, 1.0, 0.1, 1.0),
                          ohmic_config(2.0, 1.0, 1.0, Regime::HighTemperature, 1.5)}) {
        const auto g = green(c, 0.0);
        CHECK(g.g == 0.0);
        CHECK(g.g1 == doctest::Approx(0.5).epsilon(1e-14));
    }
    CHECK_THROWS_AS(green(ohmic_config(1.0, 1.0, 1.0), -0.1), DomainError);
}

TEST_CASE("Ohmic Green function against numerical inversion of alpha") {
    const auto c = ohmic_config(1.0, 1.0, 1.0);
    const auto closed = green(c, 1.0);
    CHECK(closed.g == doctest::Approx(0.6321205588285577).epsilon(1e-14));
    const auto numeric = green_numerical(c, 1.0);
    CHECK(numeric.g == doctest::Approx(closed.g).epsilon(1e-8));
    CHECK(numeric.g1 == doctest::Approx(closed.g1).epsilon(1e-8));
    CHECK(numeric.g2 == doctest::Approx(closed.g2).epsilon(1e-7));

    const auto srt = srt_config(1.0, 1.0, 0.1, 1.0);
    for (double t : {0.05, 0.7, 3.0}) {
        const auto a = green(srt, t), b = green_numerical(srt, t);
        CHECK(b.g == doctest::Approx(a.g).epsilon(1e-8));
        CHECK(b.g1 == doctest::Approx(a.g1).epsilon(1e-8));
        CHECK(b.g2 == doctest::Approx(a.g2).epsilon(1e-7));
    }
}

TEST_CASE("closed Green terms reproduce the explicit forms") {
    for (const auto& c : {ohmic_config(1.3, 0.7, 1.0), srt_config(1.0, 1.0, 0.1, 1.0),
                          srt_config(1.0, 1.0, 0.25, 1.0)}) {
        const ClosedGreen closed(c);
        for (double t : {0.0, 0.01, 0.5, 2.0, 9.0}) {
            const auto a = green(c, t);
            const auto b = closed.eval(t);
            CHECK(b.g == doctest::Approx(a.g).epsilon(1e-12));
            CHECK(b.g1 == doctest::Approx(a.g1).epsilon(1e-12));
            CHECK(b.g2 == doctest::Approx(a.g2).epsilon(1e-12));
            CHECK(b.g3 == doctest::Approx(a.g3).epsilon(1e-12));
        }
        // finite transform at w -> 0 is the plain integral of G
        const double t = 1.7;
        const double direct = quad::integrate([&](double u) { return closed.derivative(u, 0); }, 0, t);
        CHECK(closed.finite_transform(0.0, t, 0).real() == doctest::Approx(direct).epsilon(1e-12));
        const auto ft = closed.finite_transform(3.0, t, 1);
        const double re = quad::integrate([&](double u) { return closed.derivative(u, 1) * std::cos(3 * u); }, 0, t);
        const double im = quad::integrate([&](double u) { return closed.derivative(u, 1) * std::sin(3 * u); }, 0, t);
        CHECK(ft.real() == doctest::Approx(re).epsilon(1e-11));
        CHECK(ft.imag() == doctest::Approx(im).epsilon(1e-11));
    }
}

TEST_CASE("degenerate relaxation roots") {
    const auto c = srt_config(1.0, 1.0, 0.25, 1.0);  // 4 zeta tau / m = 1
    const auto g = gamma_pm(c);
    CHECK(g.plus == doctest::Approx(2.0));
    CHECK(green(c, 0.0).g1 == doctest::Approx(1.0));
    CHECK(green_ode_residual(c, 0.9) < 1e-9);
    // close but distinct roots agree with the double-root limit
    const auto near = srt_config(1.0, 1.0, 0.25 * (1 - 1e-9), 1.0);
    CHECK(green(near, 1.3).g == doctest::Approx(green(c, 1.3).g).epsilon(1e-6));
}

TEST_CASE("SRT Green function approaches the Ohmic one") {
    const auto ohmic = ohmic_config(1.0, 1.0, 1.0);
    const auto srt = srt_config(1.0, 1.0, 1e-3, 1.0);
    CHECK(std::abs(green(srt, 1.0).g - green(ohmic, 1.0).g) < 2e-3);

    // max |G_srt - G_ohmic| on [0, 10] scales at least linearly in tau
    std::vector<double> errs;
    const std::vector<double> taus{1e-2, 1e-3, 1e-4};
    for (double tau : taus) {
        const auto c = srt_config(1.0, 1.0, tau, 1.0);
        double worst = 0.0;
        for (double t = 0.0; t <= 10.0; t += 0.001)
            worst = std::max(worst, std::abs(green(c, t).g - green(ohmic, t).g));
        errs.push_back(worst);
    }
    const double order = std::log(errs[0] / errs[2]) / std::log(taus[0] / taus[2]);
    CHECK(order >= 0.99);
}

TEST_CASE("Green function ODE residual") {
    CHECK(green_ode_residual(ohmic_config(1.0, 1.0, 1.0), 1.0) < 1e-10);
    CHECK(green_ode_residual(srt_config(1.0, 1.0, 0.1, 1.0), 0.7) < 1e-8);
    const auto spring = ohmic_config(1.0, 1.0, 1.0, Regime::HighTemperature, 1.0);
    CHECK(green_ode_residual(spring, 2.0) < 1e-6);
    CHECK_THROWS_AS(green_ode_residual(spring, 0.0), DomainError);
}

TEST_CASE("SRT local coefficients") {
    const auto c = srt_config(1.0, 1.0, 0.1, 1.0);
    const auto g = gamma_pm(c);
    const auto at0 = local_coefficients(c, 0.0);
    CHECK(std::abs(at0.two_gamma) < 1e-12);
    CHECK(at0.omega_sq.value == doctest::Approx(g.plus * g.minus).epsilon(1e-12));
    const auto late = local_coefficients(c, 30.0 / g.minus);
    CHECK(late.two_gamma == doctest::Approx(1.127016653792583).epsilon(1e-6));
    CHECK(std::abs(late.omega_sq.value) < 1e-6);

    // relaxation form vs the generic ratio of Green derivatives
    for (double t : {0.0, 0.03, 0.4, 2.0, 8.0}) {
        const auto a = local_coefficients(c, t);
        const auto b = local_coefficients_from_green(green(c, t));
        CHECK(a.two_gamma == doctest::Approx(b.two_gamma).epsilon(1e-10));
        CHECK(a.omega_sq.value == doctest::Approx(b.omega_sq.value).epsilon(1e-10));
    }

    // 2 Gamma = -d log(Gdot^2 - G Gddot)/dt
    auto log_den = [&](double t) {
        const auto e = green(c, t);
        return std::log(e.g1 * e.g1 - e.g * e.g2);
    };
    for (double t : {0.05, 0.3, 1.0, 4.0}) {
        const double h = 1e-4;
        const double numeric = -(log_den(t + h) - log_den(t - h)) / (2 * h);
        CHECK(std::abs(numeric - local_coefficients(c, t).two_gamma) < 1e-6);
    }

    // no overflow for very short relaxation times at late times
    const auto stiff = srt_config(1.0, 1.0, 1e-5, 1.0);
    const auto s = local_coefficients(stiff, 10.0);
    CHECK(std::isfinite(s.two_gamma));
    CHECK(s.two_gamma == doctest::Approx(gamma_pm(stiff).minus).epsilon(1e-10));
}

TEST_CASE("integral of Omega^2 recovers the Ohmic delta weight") {
    const double tau = 1e-3;
    const auto c = srt_config(1.0, 1.0, tau, 1.0);
    std::vector<double> pts{0.0};
    for (double x = tau; x < 200 * tau; x *= 1.5) pts.push_back(x);
    const double head = quad::integrate_panels([&](double t) { return local_coefficients(c, t).omega_sq.value; }, pts);
    const double total = head + quad::integrate_to_infinity(
                                    [&](double t) { return local_coefficients(c, t).omega_sq.value; }, pts.back());
    // the delta is 2 zeta/m delta(t) but only half of it lies in t > 0
    CHECK(total == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("Ohmic local coefficients") {
    const auto c = ohmic_config(2.0, 1.0, 1.0);
    const auto at0 = local_coefficients(c, 0.0);
    CHECK(at0.omega_sq.distributional);
    CHECK(at0.omega_sq.delta_weight == doctest::Approx(1.0));
    const auto later = local_coefficients(c, 0.5);
    CHECK(later.two_gamma == doctest::Approx(0.5));
    CHECK(later.omega_sq.value == 0.0);
    CHECK_FALSE(later.omega_sq.distributional);
    CHECK_THROWS_AS(local_coefficients(ohmic_config(1, 1, 1, Regime::HighTemperature, 1.0), 1.0),
                    UnsupportedError);
}

TEST_CASE("mean motion obeys the local equation") {
    const auto c = srt_config(1.0, 1.0, 0.1, 1.0);
    const double m = c.m();
    for (double x0 : {1.0, -0.4}) {
        for (double v0 : {0.0, 2.0}) {
            for (double t = 0.01; t < 12.0; t += 0.13) {
                const auto g = green(c, t);
                const double x = m * g.g1 * x0 + m * g.g * v0;
                const double v = m * g.g2 * x0 + m * g.g1 * v0;
                const double a = m * g.g3 * x0 + m * g.g2 * v0;
                const auto lc = local_coefficients(c, t);
                CHECK(std::abs(a + lc.two_gamma * v + lc.omega_sq.value * x) < 1e-7);
            }
        }
    }
}

TEST_CASE("denominator stays positive") {
    for (const auto& c : {ohmic_config(1.0, 1.0, 1.0), srt_config(1.0, 1.0, 0.1, 1.0),
                          srt_config(1.0, 1.0, 0.249, 1.0)}) {
        for (double t = 0.01; t <= 20.0; t += 0.01) {
            const auto g = green(c, t);
            CHECK(g.g1 * g.g1 - g.g * g.g2 > 0.0);
        }
    }
}

TEST_CASE("high-temperature Ohmic diffusion coefficients") {
    const auto c = ohmic_config(1.0, 2.0, 3.0);
    for (double t : {0.1, 1.0, 5.0}) {
        const auto d = diffusion_coefficients(c, t);
        CHECK(d.f == 0.0);
        CHECK(d.h == doctest::Approx(2.0 * 3.0 / c.hbar()));
    }
    CHECK_THROWS_AS(diffusion_coefficients(c, 0.0), DomainError);
    CHECK_THROWS_AS(diffusion_coefficients(ohmic_config(1, 1, 0, Regime::ZeroTemperature), 1.0),
                    DivergenceError);
}

TEST_CASE("SRT high-temperature diffusion coefficients at short times") {
    const double tau = 0.1, kT = 2.0;
    const auto c = srt_config(1.0, 1.0, tau, kT);
    // the force correlations themselves vanish with the integration range
    const auto tiny = diffusion_coefficients(c, 1e-6);
    CHECK(std::abs(tiny.xf_sym) < 1e-9);
    CHECK(std::abs(tiny.vf_sym) < 1e-3);
    // 2 Gamma ~ t^2 so f tends to 2 kT tau / hbar while h grows like 1/t
    CHECK(diffusion_coefficients(c, 1e-4).f == doctest::Approx(2.0 * kT * tau).epsilon(1e-3));
    const double h1 = diffusion_coefficients(c, 1e-4).h, h2 = diffusion_coefficients(c, 2e-4).h;
    CHECK(h1 / h2 == doctest::Approx(2.0).epsilon(1e-2));
    // Ohmic limit at late times: h -> 2 kT / hbar
    CHECK(diffusion_coefficients(srt_config(1, 1, 1e-4, kT), 5.0).h ==
          doctest::Approx(2.0 * kT).epsilon(1e-3));
}

TEST_CASE("exact-regime force correlations approach the classical ones at high temperature") {
    auto hot = srt_config(1.0, 1.0, 0.1, 200.0, Regime::Exact);
    const auto classical = srt_config(1.0, 1.0, 0.1, 200.0);
    const auto a = diffusion_coefficients(hot, 0.5), b = diffusion_coefficients(classical, 0.5);
    CHECK(a.xf_sym == doctest::Approx(b.xf_sym).epsilon(1e-2));
    CHECK(a.vf_sym == doctest::Approx(b.vf_sym).epsilon(1e-2));
    CHECK(force_correlation(classical, 0.2) == doctest::Approx(200.0 * 10.0 * std::exp(-2.0)));
}
