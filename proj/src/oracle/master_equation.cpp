#include "hpz/oracle/master_equation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "hpz/error.hpp"
#include "hpz/fluctuations.hpp"
#include "hpz/green.hpp"
#include "hpz/simd/kernels.hpp"

namespace hpz::oracle {

void PhaseSpaceGrid::validate() const {
    if (n_q < 64 || n_p < 64) throw DomainError("PhaseSpaceGrid: at least 64 points per axis");
    if (!(q_max > q_min) || !(p_max > p_min)) throw DomainError("PhaseSpaceGrid: empty domain");
    if (dt < 0.0) throw DomainError("PhaseSpaceGrid: negative time step");
}

namespace {

void require_srt(const PhysicalConfig& c, const char* who) {
    c.validate();
    if (c.is_ohmic())
        throw UnsupportedError(std::string(who) +
                               ": needs the SRT bath (the Ohmic Omega^2(t) has a delta at t = 0)");
    if (c.thermal.regime != Regime::HighTemperature)
        throw UnsupportedError(std::string(who) + ": needs the high-temperature regime (finite f, h)");
    if (!c.free_particle()) throw UnsupportedError(std::string(who) + ": free particle only");
}

// Closed-form mean and standard deviation of x and p at t.
struct Spread {
    double mx, sx, mp, sp;
};

Spread spread_at(const PhysicalConfig& c, const InitialState& s, double t) {
    const double m = c.m(), hbar = c.hbar();
    const double var_p0 = hbar * hbar / (4.0 * s.sigma * s.sigma) + (s.thermal() ? m * c.kT() : 0.0);
    const double var_q0 = s.sigma * s.sigma;
    if (t <= 0.0) return {s.x0, std::sqrt(var_q0), 0.0, std::sqrt(var_p0)};
    const auto g = green(c, t);
    const auto a = covariance(c, t);
    // x = m Gdot q0 + G p0 + X, p = m (m Gddot q0 + Gdot p0) + m Xdot
    const double vx = m * m * g.g1 * g.g1 * var_q0 + g.g * g.g * var_p0 + a.a_qq;
    const double vp = m * m * (m * m * g.g2 * g.g2 * var_q0 + g.g1 * g.g1 * var_p0) + a.a_pp;
    return {m * g.g1 * s.x0, std::sqrt(vx), m * m * g.g2 * s.x0, std::sqrt(vp)};
}

}  // namespace

PhaseSpaceGrid default_grid(const PhysicalConfig& c, const InitialState& s, double t_final, int n_q, int n_p,
                            double width) {
    require_srt(c, "default_grid");
    s.validate();
    // a pair is two packets at +-d/2 about x0
    const double half = s.pair() ? 0.5 * s.d : 0.0;
    double q_lo = 1e300, q_hi = -1e300, p_lo = 1e300, p_hi = -1e300;
    constexpr int kSamples = 40;
    for (int k = 0; k <= kSamples; ++k) {
        const double t = t_final * k / kSamples;
        for (double sign : {-1.0, 1.0}) {
            InitialState one = s;
            one.x0 = s.x0 + sign * half;
            const Spread sp = spread_at(c, one, t);
            q_lo = std::min(q_lo, sp.mx - width * sp.sx);
            q_hi = std::max(q_hi, sp.mx + width * sp.sx);
            p_lo = std::min(p_lo, sp.mp - width * sp.sp);
            p_hi = std::max(p_hi, sp.mp + width * sp.sp);
        }
    }
    PhaseSpaceGrid g;
    g.q_min = q_lo;
    g.q_max = q_hi;
    g.p_min = p_lo;
    g.p_max = p_hi;
    g.n_q = n_q;
    g.n_p = n_p;
    return g;
}

SymmetricCorrelations moment_consistent_diffusion(const PhysicalConfig& c, double t) {
    if (!(t >= 0.0)) throw DomainError("moment_consistent_diffusion: requires t >= 0");
    if (t == 0.0) return {};
    const double m = c.m();
    const double scale = c.is_ohmic() ? m / c.zeta() : std::min(c.tau(), m / c.zeta());
    const double h = std::min(1e-3 * scale, 0.25 * t);
    // phase-space moments of the fluctuation: <X^2>, sym <XP>, <P^2>
    auto moments = [&](double u) {
        const auto x = x_moments(c, u);
        return std::array<double, 3>{x.xx, 0.5 * m * x.xv_sym, m * m * x.vv};
    };
    const auto y = moments(t), ym2 = moments(t - 2 * h), ym1 = moments(t - h), yp1 = moments(t + h),
               yp2 = moments(t + 2 * h);
    std::array<double, 3> dy;
    for (int i = 0; i < 3; ++i) dy[i] = (ym2[i] - 8.0 * ym1[i] + 8.0 * yp1[i] - yp2[i]) / (12.0 * h);
    const auto local = local_coefficients(c, t);
    const double om2 = local.omega_sq.value, g2 = local.two_gamma;
    const double d_qp = dy[1] - y[2] / m + m * om2 * y[0] + g2 * y[1];
    const double d_pp = 0.5 * (dy[2] + 2.0 * m * om2 * y[1] + 2.0 * g2 * y[2]);
    return {2.0 * d_qp, 2.0 * d_pp / m};
}

MasterCoefficients master_coefficients(const PhysicalConfig& c, double t, DiffusionRoute route) {
    require_srt(c, "master_coefficients");
    const auto local = local_coefficients(c, t);
    MasterCoefficients k;
    k.t = t;
    k.two_gamma = local.two_gamma;
    k.omega_sq = local.omega_sq.value;
    if (t > 0.0) {
        SymmetricCorrelations d;
        if (route == DiffusionRoute::MomentConsistent) {
            d = moment_consistent_diffusion(c, t);
        } else {
            const auto dc = diffusion_coefficients(c, t);
            d = {dc.xf_sym, dc.vf_sym};
        }
        k.d_pp = 0.5 * c.m() * d.vf_sym;
        k.d_qp = 0.5 * d.xf_sym;
    }
    return k;
}

std::vector<double> MasterSolution::density() const {
    std::vector<double> out(grid.n_q, 0.0);
    const double dp = grid.dp();
    for (int i = 0; i < grid.n_q; ++i) {
        double sum = 0.0;
        for (int j = 0; j < grid.n_p; ++j) sum += w[static_cast<std::size_t>(i) * grid.n_p + j];
        out[i] = sum * dp;
    }
    return out;
}

GridMoments grid_moments(const PhaseSpaceGrid& g, const std::vector<double>& w) {
    double s0 = 0, sx = 0, sp = 0, sxx = 0, spp = 0, sxp = 0;
    for (int i = 0; i < g.n_q; ++i) {
        const double q = g.q(i);
        for (int j = 0; j < g.n_p; ++j) {
            const double p = g.p(j), v = w[static_cast<std::size_t>(i) * g.n_p + j];
            s0 += v;
            sx += q * v;
            sp += p * v;
            sxx += q * q * v;
            spp += p * p * v;
            sxp += q * p * v;
        }
    }
    const double cell = g.dq() * g.dp();
    GridMoments m;
    m.mass = s0 * cell;
    m.mean_x = sx / s0;
    m.mean_p = sp / s0;
    m.var_x = sxx / s0 - m.mean_x * m.mean_x;
    m.var_p = spp / s0 - m.mean_p * m.mean_p;
    m.cov_xp = sxp / s0 - m.mean_x * m.mean_p;
    return m;
}

namespace {

// Bound on the spectrum of the semi-discrete operator: |imaginary part| from
// the first-derivative terms, |real part| from the second-derivative ones.
struct SpectrumBound {
    double imag, real;
};

SpectrumBound spectrum_bound(const PhysicalConfig& c, const PhaseSpaceGrid& g, const MasterCoefficients& k) {
    const double qmax = std::max(std::abs(g.q_min), std::abs(g.q_max));
    const double pmax = std::max(std::abs(g.p_min), std::abs(g.p_max));
    const double dq = g.dq(), dp = g.dp();
    const double imag = pmax / (c.m() * dq) + (c.m() * std::abs(k.omega_sq) * qmax + std::abs(k.two_gamma) * pmax) / dp;
    const double real = 4.0 * std::abs(k.d_pp) / (dp * dp) + std::abs(k.d_qp) / (dq * dp) + std::abs(k.two_gamma);
    return {imag, real};
}

}  // namespace

double stable_time_step(const PhysicalConfig& c, const PhaseSpaceGrid& g, double t_final, DiffusionRoute route) {
    require_srt(c, "stable_time_step");
    g.validate();
    // SSP-RK3 reaches sqrt(3) on the imaginary axis and ~2.5 on the negative real axis
    double worst = 0.0;
    constexpr int kSamples = 64;
    for (int k = 0; k <= kSamples; ++k) {
        const auto b = spectrum_bound(c, g, master_coefficients(c, t_final * k / kSamples, route));
        worst = std::max(worst, b.imag / std::sqrt(3.0) + b.real / 2.5);
    }
    return 0.9 / worst;
}

MasterSolution integrate_master_equation(const PhysicalConfig& c, const InitialState& s,
                                         const PhaseSpaceGrid& grid, double t_final, DiffusionRoute route) {
    require_srt(c, "integrate_master_equation");
    grid.validate();
    s.validate();
    if (!(t_final >= 0.0)) throw DomainError("integrate_master_equation: t_final must be >= 0");

    const double max_dt = t_final > 0.0 ? stable_time_step(c, grid, t_final, route) : 0.0;
    if (grid.dt > max_dt * (1.0 + 1e-12) && t_final > 0.0)
        throw DomainError("integrate_master_equation: stability violation, dt = " + std::to_string(grid.dt) +
                          " exceeds the stable step " + std::to_string(max_dt));
    const int steps = t_final > 0.0 ? static_cast<int>(std::ceil(t_final / (grid.dt > 0.0 ? grid.dt : max_dt))) : 0;
    const double dt = steps ? t_final / steps : 0.0;

    const int nq = grid.n_q, np = grid.n_p;
    const std::size_t size = static_cast<std::size_t>(nq) * np;
    std::vector<double> p(np), w(size, 0.0);
    for (int j = 0; j < np; ++j) p[j] = grid.p(j);
    // boundary rows and columns stay zero
    for (int i = 1; i + 1 < nq; ++i)
        for (int j = 1; j + 1 < np; ++j)
            w[static_cast<std::size_t>(i) * np + j] = initial_wigner(s, c, grid.q(i), p[j]);

    const double cell = grid.dq() * grid.dp();
    auto mass_of = [&](const std::vector<double>& v) {
        double sum = 0.0;
        for (double x : v) sum += x;
        return sum * cell;
    };
    const double mass0 = mass_of(w);

    // Coefficients at the stage times t, t + dt, t + dt/2 of every step,
    // i.e. on the half-step lattice.
    std::vector<MasterCoefficients> table(2 * static_cast<std::size_t>(steps) + 1);
    for (std::size_t k = 0; k < table.size(); ++k) table[k] = master_coefficients(c, 0.5 * dt * k, route);

    simd::RowCoefficients base;
    base.inv_m = 1.0 / c.m();
    base.inv_2dq = 0.5 / grid.dq();
    base.inv_2dp = 0.5 / grid.dp();
    base.inv_dp2 = 1.0 / (grid.dp() * grid.dp());
    base.inv_4dqdp = 0.25 / (grid.dq() * grid.dp());

    auto rhs = [&](const std::vector<double>& u, const MasterCoefficients& k, std::vector<double>& out) {
        simd::RowCoefficients rc = base;
        rc.two_gamma = k.two_gamma;
        rc.d_pp = k.d_pp;
        rc.d_qp = k.d_qp;
        for (int i = 1; i + 1 < nq; ++i) {
            rc.drift_p = c.m() * k.omega_sq * grid.q(i);
            const std::size_t r = static_cast<std::size_t>(i) * np;
            simd::phase_space_row(&u[r - np], &u[r], &u[r + np], p.data(), &out[r], np, rc);
        }
    };

    MasterSolution sol;
    sol.grid = grid;
    sol.grid.dt = dt;
    // l is never written on the boundary, so W stays zero there
    std::vector<double> l(size, 0.0), u1(size, 0.0), u2(size, 0.0);
    for (int n = 0; n < steps; ++n) {
        const std::size_t h = 2 * static_cast<std::size_t>(n);
        rhs(w, table[h], l);
        for (std::size_t k = 0; k < size; ++k) u1[k] = w[k] + dt * l[k];
        rhs(u1, table[h + 2], l);
        for (std::size_t k = 0; k < size; ++k) u2[k] = 0.75 * w[k] + 0.25 * (u1[k] + dt * l[k]);
        rhs(u2, table[h + 1], l);
        for (std::size_t k = 0; k < size; ++k) w[k] = (w[k] + 2.0 * (u2[k] + dt * l[k])) / 3.0;
        const double drift = std::abs(mass_of(w) - mass0);
        sol.max_mass_drift = std::max(sol.max_mass_drift, drift);
        if (!(drift <= 1e-4))
            throw ConsistencyError("integrate_master_equation: mass loss " + std::to_string(drift) + " at t = " +
                                   std::to_string(dt * (n + 1)));
    }
    sol.t = t_final;
    sol.steps = steps;
    sol.moments = grid_moments(grid, w);
    sol.w = std::move(w);
    return sol;
}

double density_l1_distance(const MasterSolution& sol, const SpatialDensity& exact) {
    const auto P = sol.density();
    double sum = 0.0;
    for (int i = 0; i < sol.grid.n_q; ++i) sum += std::abs(P[i] - exact(sol.grid.q(i)));
    return sum * sol.grid.dq();
}

}  // namespace hpz::oracle
