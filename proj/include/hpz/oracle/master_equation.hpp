#pragma once

#include <vector>

#include "hpz/config.hpp"
#include "hpz/evolution.hpp"

namespace hpz::oracle {

struct PhaseSpaceGrid {
    double q_min{-1.0}, q_max{1.0};
    double p_min{-1.0}, p_max{1.0};
    int n_q{256}, n_p{256};
    double dt{0.0};  // 0 picks the largest stable step

    double dq() const { return (q_max - q_min) / (n_q - 1); }
    double dp() const { return (p_max - p_min) / (n_p - 1); }
    double q(int i) const { return q_min + i * dq(); }
    double p(int j) const { return p_min + j * dp(); }
    void validate() const;
};

// Grid covering `width` standard deviations of the closed-form solution,
// maximized over [0, t_final].
PhaseSpaceGrid default_grid(const PhysicalConfig& c, const InitialState& s, double t_final, int n_q = 256,
                            int n_p = 256, double width = 7.0);

// Coefficients of W_t = -(p/m) W_q + m Om2 q W_p + 2 Gamma (p W)_p + d_pp W_pp + d_qp W_qp,
// d_pp = hbar m Gamma h, d_qp = hbar Gamma f.
struct MasterCoefficients {
    double t{0.0};
    double two_gamma{0.0};
    double omega_sq{0.0};
    double d_pp{0.0};
    double d_qp{0.0};
};

// Where d_pp and d_qp come from. MomentConsistent fixes them so that the
// second moments of X(t) obey the moment equations exactly:
//   d_qp = d<XP>/dt - <P^2>/m + m Om2 <X^2> + 2 Gamma <XP>
//   d_pp = (d<P^2>/dt + 2 m Om2 <XP> + 4 Gamma <P^2>) / 2,   P = m Xdot.
// ForceCorrelation uses <XF+FX> and <XdotF+FXdot> (diffusion_coefficients),
// which equals the former only when G''(u) + 2 Gamma(t) G'(u) + Om2(t) G(u)
// vanishes for all u <= t, i.e. for the Ohmic bath.
enum class DiffusionRoute { MomentConsistent, ForceCorrelation };

struct SymmetricCorrelations {
    double xf_sym{0.0};  // 2 d_qp
    double vf_sym{0.0};  // 2 d_pp / m
};

// The moment-consistent pair, by a 5-point derivative of x_moments.
SymmetricCorrelations moment_consistent_diffusion(const PhysicalConfig& c, double t);

// SRT bath only; the Ohmic Omega^2(t) carries a delta at t = 0.
MasterCoefficients master_coefficients(const PhysicalConfig& c, double t,
                                       DiffusionRoute route = DiffusionRoute::MomentConsistent);

struct GridMoments {
    double mass{0.0};
    double mean_x{0.0}, mean_p{0.0};
    double var_x{0.0}, var_p{0.0}, cov_xp{0.0};
};

struct MasterSolution {
    PhaseSpaceGrid grid;
    double t{0.0};
    int steps{0};
    std::vector<double> w;  // w[i * n_p + j] = W(q_i, p_j)
    GridMoments moments;
    double max_mass_drift{0.0};  // over the run, relative to the initial grid mass

    // P(x) on the q grid.
    std::vector<double> density() const;
};

GridMoments grid_moments(const PhaseSpaceGrid& g, const std::vector<double>& w);

// Largest step the explicit scheme takes safely on this grid.
double stable_time_step(const PhysicalConfig& c, const PhaseSpaceGrid& g, double t_final,
                        DiffusionRoute route = DiffusionRoute::MomentConsistent);

// Method of lines: centred second-order differences, SSP-RK3 in time with the
// coefficients sampled at the stage times. Throws DomainError when grid.dt
// exceeds the stable step and ConsistencyError on mass loss above 1e-4.
MasterSolution integrate_master_equation(const PhysicalConfig& c, const InitialState& s,
                                         const PhaseSpaceGrid& grid, double t_final,
                                         DiffusionRoute route = DiffusionRoute::MomentConsistent);

// int |P_grid(x) - P(x)| dx on the q grid.
double density_l1_distance(const MasterSolution& sol, const SpatialDensity& exact);

}  // namespace hpz::oracle
