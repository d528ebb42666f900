#include "hpz/oracle/moment_odes.hpp"

#include <array>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "hpz/error.hpp"
#include "hpz/fluctuations.hpp"
#include "hpz/green.hpp"
#include "hpz/oracle/master_equation.hpp"

namespace hpz::oracle {

SecondMoments initial_moments(const InitialState& s, const PhysicalConfig& c) {
    s.validate();
    if (s.pair()) throw UnsupportedError("initial_moments: single Gaussian packets only");
    SecondMoments m;
    m.x_sq = s.sigma * s.sigma;
    m.p_sq = c.hbar() * c.hbar() / (4.0 * s.sigma * s.sigma) + (s.thermal() ? c.m() * c.kT() : 0.0);
    return m;
}

std::vector<SecondMoments> integrate_moment_odes(const PhysicalConfig& c, const SecondMoments& initial,
                                                 const std::vector<double>& times, DiffusionRoute route) {
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 3>;  // x^2, sym(xp), p^2
    for (std::size_t k = 0; k < times.size(); ++k)
        if (!(times[k] >= 0.0) || (k && times[k] < times[k - 1]))
            throw DomainError("integrate_moment_odes: times must be ascending and >= 0");
    const double m = c.m();
    auto system = [&](const State& y, State& dy, double t) {
        const auto k = master_coefficients(c, t, route);
        dy[0] = 2.0 * y[1] / m;
        dy[1] = y[2] / m - m * k.omega_sq * y[0] - k.two_gamma * y[1] + k.d_qp;
        dy[2] = -2.0 * m * k.omega_sq * y[1] - 2.0 * k.two_gamma * y[2] + 2.0 * k.d_pp;
    };

    std::vector<SecondMoments> out;
    if (times.empty()) return out;
    State y{initial.x_sq, initial.xp_sym, initial.p_sq};
    // the system starts at t = 0; leading zero times just echo the initial moments
    std::vector<double> grid{0.0};
    for (double t : times)
        if (t > 0.0) grid.push_back(t);
    for (double t : times)
        if (t == 0.0) out.push_back({0.0, y[0], y[1], y[2]});
    if (grid.size() == 1) return out;

    auto stepper = odeint::make_controlled(1e-9, 1e-9, odeint::runge_kutta_dopri5<State>());
    auto observer = [&](const State& s, double t) {
        if (t > 0.0) out.push_back({t, s[0], s[1], s[2]});
    };
    const double dt0 = std::min(1e-3, 1e-3 * grid.back());
    try {
        odeint::integrate_times(stepper, system, y, grid.begin(), grid.end(), dt0, observer,
                                odeint::max_step_checker(100000));
    } catch (const odeint::step_adjustment_error& e) {
        throw ConsistencyError(std::string("integrate_moment_odes: step size collapsed (stiff system; "
                                           "avoid very small tau relative to the output spacing): ") + e.what());
    } catch (const odeint::no_progress_error& e) {
        throw ConsistencyError(std::string("integrate_moment_odes: no progress (stiff system; "
                                           "avoid very small tau relative to the output spacing): ") + e.what());
    }
    return out;
}

DiffusionCrossCheck diffusion_from_moments(const PhysicalConfig& c, double t) {
    if (!(t > 0.0)) throw DomainError("diffusion_from_moments: requires t > 0");
    const auto d = moment_consistent_diffusion(c, t);
    const auto k = diffusion_coefficients(c, t);
    DiffusionCrossCheck out;
    out.t = t;
    out.xf_sym_moments = d.xf_sym;
    out.vf_sym_moments = d.vf_sym;
    out.xf_sym_kernel = k.xf_sym;
    out.vf_sym_kernel = k.vf_sym;
    // f and h share the factor 2 hbar Gamma, so relative differences carry over;
    // the Ohmic <XF+FX> is exactly zero and is compared on the scale of <XdotF+FXdot> t
    auto rel = [](double a, double b, double scale) { return std::abs(a - b) / std::max(std::abs(b), scale); };
    out.f_rel = rel(d.xf_sym, k.xf_sym, std::abs(k.vf_sym) * t);
    out.h_rel = rel(d.vf_sym, k.vf_sym, 0.0);
    return out;
}

}  // namespace hpz::oracle
