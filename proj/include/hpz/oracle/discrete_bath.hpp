#pragma once

#include <cstdint>
#include <vector>

#include "hpz/config.hpp"
#include "hpz/evolution.hpp"

namespace hpz::oracle {

struct BathMode {
    double mass{0.0};
    double omega{0.0};
    double weight() const { return mass * omega * omega; }
};

// Independent-oscillator bath on the midpoint grid w_j = (j - 1/2) dw.
struct DiscreteBath {
    std::vector<BathMode> modes;
    double d_omega{0.0};
    double cutoff{0.0};

    std::size_t count() const { return modes.size(); }
    double recurrence_time() const;
    // sum_j m_j w_j^2 cos(w_j t)
    double memory(double t) const;
};

// Weights m_j w_j^2 = (2/pi) Re mu~(w_j) dw.
DiscreteBath build_discrete_bath(const PhysicalConfig& c, std::size_t modes, double cutoff);

struct McOptions {
    std::size_t samples{100000};
    std::uint64_t seed{1};
    unsigned threads{1};
    int histogram_bins{0};  // x histogram at the last time, 0 for none
};

struct McPoint {
    double t{0.0};
    double xx{0.0}, xx_se{0.0};              // <X^2>
    double xx_discrete{0.0};                 // exact expectation for this discrete bath
    double mean_x{0.0}, mean_x_se{0.0};
    double var_x{0.0}, var_x_se{0.0};
};

struct McHistogram {
    double x_min{0.0}, x_max{0.0};
    std::vector<double> density;  // per unit length
};

struct McReport {
    std::vector<McPoint> points;
    std::size_t samples{0};
    std::size_t modes{0};
    double cutoff{0.0};
    std::uint64_t seed{0};
    McHistogram histogram;
};

// Samples the bath oscillators from their Wigner functions and the particle
// from the initial Wigner function, and forms x(t) = m Gdot x0 + G p0 + X(t).
// F is a sum of modes, so X(t) = sum_j q_j m_j w_j^2 Re[...] + p_j w_j Im[...]
// with the convolution of G with each mode done in closed form.
// Deterministic for a given seed regardless of `threads`.
McReport mc_estimate(const PhysicalConfig& c, const DiscreteBath& bath, const InitialState& s,
                     const std::vector<double>& t_grid, const McOptions& options);

struct McScaling {
    std::vector<double> samples;
    std::vector<double> rms_error;  // of <X^2> about the discrete-bath expectation
    double exponent{0.0};
};

// RMS error of the <X^2>(t) estimator over `batches` independent runs for each
// sample count, and its log-log slope.
McScaling mc_error_scaling(const PhysicalConfig& c, const DiscreteBath& bath, double t,
                           const std::vector<std::size_t>& sample_counts, std::size_t batches,
                           std::uint64_t seed);

}  // namespace hpz::oracle
