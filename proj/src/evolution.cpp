#include "hpz/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "hpz/error.hpp"
#include "hpz/green.hpp"
#include "hpz/quadrature.hpp"

namespace hpz {

namespace {

using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

double inv_lambda_sq(const PhysicalConfig& c) {
    const double l = thermal_length(c);
    return std::isfinite(l) ? 1.0 / (l * l) : 0.0;
}

// Free-particle moments, zero at t = 0.
XMoments moments_at(const PhysicalConfig& c, double t) {
    if (t == 0.0) return {};
    return x_moments(c, t);
}

// Position and momentum of the mean motion: (q, p)(t) = L (q', p')^T with
// L = [[m Gdot, G], [m^2 Gddot, m Gdot]]. At t = 0 exactly the identity: the
// Ohmic impulse -zeta q(0) acts at 0+.
void mean_motion(const PhysicalConfig& c, double t, double l[2][2]) {
    if (t == 0.0) {
        l[0][0] = 1.0, l[0][1] = 0.0, l[1][0] = 0.0, l[1][1] = 1.0;
        return;
    }
    const auto g = green(c, t);
    const double m = c.m();
    l[0][0] = m * g.g1, l[0][1] = g.g, l[1][0] = m * m * g.g2, l[1][1] = m * g.g1;
}

}  // namespace

InitialState InitialState::gaussian(double x0, double sigma, bool thermal) {
    InitialState s;
    s.kind = thermal ? StateKind::ThermalGaussian : StateKind::Gaussian;
    s.x0 = x0;
    s.sigma = sigma;
    s.validate();
    return s;
}

InitialState InitialState::cat(double d, double sigma, bool thermal) {
    InitialState s;
    s.kind = thermal ? StateKind::ThermalCatPair : StateKind::CatPair;
    s.d = d;
    s.sigma = sigma;
    s.validate();
    return s;
}

void InitialState::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("initial state: sigma must be > 0");
    if (pair() && !(d > 0.0)) throw DomainError("initial state: pair separation d must be > 0");
    if (!std::isfinite(x0) || !std::isfinite(d)) throw DomainError("initial state: non-finite parameter");
}

cplx WignerTransform::operator()(double Q, double P) const {
    cplx sum = 0.0;
    for (const auto& t : terms)
        sum += t.coef * std::exp(-0.5 * (t.m_qq * Q * Q + 2.0 * t.m_qp * Q * P + t.m_pp * P * P) +
                                 t.k_q * Q + t.k_p * P);
    return sum;
}

double thermal_length(const PhysicalConfig& c) {
    if (!(c.kT() > 0.0)) return std::numeric_limits<double>::infinity();
    return c.hbar() / std::sqrt(c.m() * c.kT());
}

WignerTransform wigner_transform(const InitialState& s, const PhysicalConfig& c) {
    s.validate();
    const double hbar = c.hbar(), sig2 = s.sigma * s.sigma;
    // exp{-Q^2/8 sigma^2 - sigma^2 P^2/2 hbar^2}, thermal states with an extra exp{-Q^2/2 lambda^2}
    GaussianTerm base;
    base.m_qq = 1.0 / (4.0 * sig2) + (s.thermal() ? inv_lambda_sq(c) : 0.0);
    base.m_pp = sig2 / (hbar * hbar);
    WignerTransform w;
    if (!s.pair()) {
        base.coef = 1.0;
        base.k_p = -kI * s.x0 / hbar;
        w.terms.push_back(base);
        return w;
    }
    // (cos(Pd/2hbar) + e^{-d^2/8sigma^2} cosh(Qd/4sigma^2)) / (1 + e^{-d^2/8sigma^2})
    const double overlap = std::exp(-s.d * s.d / (8.0 * sig2));
    const double norm = 1.0 / (1.0 + overlap);
    for (double sign : {1.0, -1.0}) {
        GaussianTerm wave = base;
        wave.coef = 0.5 * norm;
        wave.k_p = sign * kI * s.d / (2.0 * hbar);
        w.terms.push_back(wave);
        GaussianTerm overlap_term = base;
        overlap_term.coef = 0.5 * norm * overlap;
        overlap_term.k_q = sign * s.d / (4.0 * sig2);
        w.terms.push_back(overlap_term);
    }
    return w;
}

WignerTransform point_transform(double q, double p, const PhysicalConfig& c) {
    GaussianTerm t;
    t.coef = 1.0;
    t.k_q = -kI * p / c.hbar();
    t.k_p = -kI * q / c.hbar();
    return {{t}};
}

double initial_wigner(const InitialState& s, const PhysicalConfig& c, double q, double p) {
    return WignerEvolution(wigner_transform(s, c), c, 0.0)(q, p);
}

WignerEvolution::WignerEvolution(const WignerTransform& w, const PhysicalConfig& c, double t)
    : w_(w), hbar_(c.hbar()) {
    if (t < 0.0) throw DomainError("evolve_wigner: t < 0");
    mean_motion(c, t, l_);
    a_[0][0] = a_[0][1] = a_[1][0] = a_[1][1] = 0.0;
    if (t > 0.0) {
        const auto cov = covariance_from(c, moments_at(c, t));
        const double h2 = hbar_ * hbar_;
        a_[0][0] = cov.a_pp / h2;
        a_[0][1] = a_[1][0] = cov.a_pq / h2;
        a_[1][1] = cov.a_qq / h2;
    }
}

double WignerEvolution::operator()(double q, double p) const {
    // Each term contributes int dr ds exp{-u.N.u/2 + j.u}, u = (r, s),
    // N = L^T M L + A, j = L^T k + i(p, q)/hbar.
    cplx sum = 0.0;
    for (const auto& t : w_.terms) {
        const double m[2][2] = {{t.m_qq, t.m_qp}, {t.m_qp, t.m_pp}};
        double n[2][2];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double v = a_[i][j];
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) v += l_[a][i] * m[a][b] * l_[b][j];
                n[i][j] = v;
            }
        const double det = n[0][0] * n[1][1] - n[0][1] * n[1][0];
        if (!(det > 0.0) || !(n[0][0] > 0.0))
            throw ConsistencyError("evolve_wigner: combined quadratic form is not positive definite");
        const cplx jr = l_[0][0] * t.k_q + l_[1][0] * t.k_p + kI * p / hbar_;
        const cplx js = l_[0][1] * t.k_q + l_[1][1] * t.k_p + kI * q / hbar_;
        const cplx quad = (n[1][1] * jr * jr - 2.0 * n[0][1] * jr * js + n[0][0] * js * js) / det;
        sum += t.coef * (2.0 * M_PI / std::sqrt(det)) * std::exp(0.5 * quad);
    }
    const double k = 2.0 * M_PI * hbar_;
    return sum.real() / (k * k);
}

double WignerEvolution::by_quadrature(double q, double p) const {
    // Integration box from the Gaussian envelope of each term.
    double radius = 0.0;
    for (const auto& t : w_.terms) {
        Eigen::Matrix2d m, l, a;
        m << t.m_qq, t.m_qp, t.m_qp, t.m_pp;
        l << l_[0][0], l_[0][1], l_[1][0], l_[1][1];
        a << a_[0][0], a_[0][1], a_[1][0], a_[1][1];
        const Eigen::Matrix2d n = l.transpose() * m * l + a;
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(n);
        const double lmin = eig.eigenvalues()(0);
        if (!(lmin > 0.0)) throw ConsistencyError("evolve_wigner: envelope is not normalizable");
        const Eigen::Vector2d kre = l.transpose() * Eigen::Vector2d(t.k_q.real(), t.k_p.real());
        radius = std::max(radius, 12.0 / std::sqrt(lmin) + (n.inverse() * kre).norm());
    }
    const quad::Tolerance tol{1e-10, 1e-14};
    auto inner = [&](double r) {
        return quad::integrate(
            [&](double s) {
                const double Q = l_[0][0] * r + l_[0][1] * s, P = l_[1][0] * r + l_[1][1] * s;
                const double env =
                    std::exp(-0.5 * (a_[0][0] * r * r + 2.0 * a_[0][1] * r * s + a_[1][1] * s * s));
                return (w_(Q, P) * std::exp(kI * (r * p + s * q) / hbar_)).real() * env;
            },
            -radius, radius, tol);
    };
    const double k = 2.0 * M_PI * hbar_;
    return quad::integrate(inner, -radius, radius, tol) / (k * k);
}

double evolve_wigner(const InitialState& s, const PhysicalConfig& c, double t, double q, double p) {
    return WignerEvolution(wigner_transform(s, c), c, t)(q, p);
}

double transition_probability(const PhysicalConfig& c, double t, double q, double p, double q0,
                              double p0) {
    if (!(t > 0.0)) throw DomainError("transition_probability: requires t > 0");
    const auto a = covariance(c, t);
    const double det = a.det();
    if (!(det > 0.0)) throw DomainError("transition_probability: det A <= 0");
    double l[2][2];
    mean_motion(c, t, l);
    const double rq = q - (l[0][0] * q0 + l[0][1] * p0);
    const double rp = p - (l[1][0] * q0 + l[1][1] * p0);
    const double form = (a.a_qq * rp * rp - 2.0 * a.a_pq * rp * rq + a.a_pp * rq * rq) / det;
    return std::exp(-0.5 * form) / (2.0 * M_PI * std::sqrt(det));
}

double SpatialDensity::operator()(double x) const {
    cplx sum = 0.0;
    for (const auto& t : terms) {
        const cplx j = t.k_q + kI * x / hbar;
        sum += t.coef * std::sqrt(2.0 * M_PI / t.m_qq) * std::exp(j * j / (2.0 * t.m_qq));
    }
    return sum.real() / (2.0 * M_PI * hbar);
}

SpatialDensity spatial_density(const InitialState& s, const PhysicalConfig& c, double t) {
    if (t < 0.0) throw DomainError("spatial_density: t < 0");
    const auto w = wigner_transform(s, c);
    double l[2][2];
    mean_motion(c, t, l);
    // P(x) = (1/2 pi hbar) int ds W~(G s, m Gdot s) exp{-<X^2> s^2/2hbar^2 + i x s/hbar}
    const double lq = l[0][1], lp = l[1][1];
    const double xx = moments_at(c, t).xx;
    SpatialDensity out;
    out.t = t;
    out.hbar = c.hbar();
    cplx norm = 0.0, first = 0.0, second = 0.0;
    for (const auto& term : w.terms) {
        GaussianTerm r;
        r.coef = term.coef;
        r.m_qq = term.m_qq * lq * lq + 2.0 * term.m_qp * lq * lp + term.m_pp * lp * lp + xx / (out.hbar * out.hbar);
        r.k_q = term.k_q * lq + term.k_p * lp;
        if (!(r.m_qq > 0.0)) throw ConsistencyError("spatial_density: non-positive variance");
        out.terms.push_back(r);
        // characteristic function phi(s) = sum coef exp(-n s^2/2 + kappa s)
        norm += r.coef;
        first += r.coef * r.k_q;
        second += r.coef * (r.k_q * r.k_q - r.m_qq);
    }
    const double h = out.hbar;
    out.mean = (kI * h * first).real() / norm.real();
    out.variance = (-h * h * second).real() / norm.real() - out.mean * out.mean;

    // Independent normalization by quadrature around the packet centres.
    const double width = std::sqrt(out.terms.front().m_qq) * h;
    double reach = std::abs(out.mean) + 14.0 * width;
    std::vector<double> pts{-reach, reach};
    if (s.pair()) {
        const double centre = 0.5 * s.d * std::abs(l[0][0]);
        reach = centre + 14.0 * width;
        pts = {-reach, -centre, 0.0, centre, reach};
    } else {
        pts = {out.mean - 14.0 * width, out.mean, out.mean + 14.0 * width};
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<double> fine;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
        for (int j = 0; j < 8; ++j) fine.push_back(pts[k] + (pts[k + 1] - pts[k]) * j / 8.0);
    fine.push_back(pts.back());
    out.normalization = quad::integrate_panels([&](double x) { return out(x); }, fine, {1e-12, 1e-15});
    if (std::abs(out.normalization - 1.0) > 1e-6)
        throw ConsistencyError("spatial_density: density does not integrate to one");
    return out;
}

double variance_report(const InitialState& s, const PhysicalConfig& c, double t) {
    return spatial_density(InitialState::gaussian(0.0, s.sigma, s.thermal()), c, t).variance;
}

AttenuationResult attenuation(const InitialState& s, const PhysicalConfig& c, double t) {
    if (!s.pair()) throw DomainError("attenuation: requires a pair state");
    if (t < 0.0) throw DomainError("attenuation: t < 0");
    AttenuationResult out;
    out.t = t;
    out.fit_law = s.thermal() ? FitLaw::GaussT2 : FitLaw::ExpT3;
    if (t == 0.0) return out;
    // The cosine coefficient over the geometric mean of the two packets; the
    // variance of a packet less its initial-state part is <X^2> (+ m kT G^2
    // for thermal states).
    double x_eff = x_moments(c, t).xx;
    if (s.thermal()) {
        const double g = green(c, t).g;
        x_eff += c.m() * c.kT() * g * g;
    }
    const double var = variance_report(s, c, t);
    out.a = std::exp(-x_eff * s.d * s.d / (8.0 * s.sigma * s.sigma * var));
    return out;
}

DecoherenceFit fit_decoherence_time(const InitialState& s, const PhysicalConfig& c, FitLaw law,
                                    double t_lo, double t_hi) {
    if (!s.pair()) throw DomainError("fit_decoherence_time: requires a pair state");
    const double decay = c.m() / c.zeta();
    if (t_hi == 0.0) {
        t_lo = 1e-3 * decay;
        t_hi = law == FitLaw::ExpT3 ? 1e-2 * decay : 1e-1 * decay;
        if (law == FitLaw::GaussT2) {
            // stay where -log a < 0.1
            while (t_hi > 10.0 * t_lo && -std::log(attenuation(s, c, t_hi).a) > 0.1) t_hi *= 0.8;
            t_lo = 0.1 * t_hi;
        }
    }
    if (!(t_lo > 0.0) || !(t_hi > t_lo)) throw DomainError("fit_decoherence_time: need 0 < t_lo < t_hi");
    if (t_hi > 0.1 * decay)
        throw FitWindowError("fit_decoherence_time: window reaches t ~ m/zeta where the short-time law fails");
    if (law == FitLaw::ExpT3) {
        if (s.thermal()) throw FitWindowError("fit_decoherence_time: the t/tau_d law is for a non-thermal pair");
        const double slit = 2.0 * c.m() * s.sigma * s.sigma / (c.hbar() * t_lo);
        if (slit * slit > 1e-2)
            throw FitWindowError("fit_decoherence_time: slit width not negligible (sigma too large for the window)");
    } else if (!s.thermal()) {
        throw FitWindowError("fit_decoherence_time: the t^2/tau_d^2 law is for a thermal pair");
    }

    // -log a / t^p = c0 + c1 t + c2 t^2, tau_d from the intercept.
    const int power = law == FitLaw::ExpT3 ? 1 : 2;
    constexpr int kPoints = 24;
    Eigen::MatrixXd design(kPoints, 3);
    Eigen::VectorXd y(kPoints), ts(kPoints);
    for (int k = 0; k < kPoints; ++k) {
        const double t = t_lo * std::pow(t_hi / t_lo, k / double(kPoints - 1));
        ts(k) = t;
        y(k) = -std::log(attenuation(s, c, t).a) / std::pow(t, power);
        design(k, 0) = 1.0;
        design(k, 1) = t;
        design(k, 2) = t * t;
    }
    const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(y);
    if (!(coef(0) > 0.0)) throw ConsistencyError("fit_decoherence_time: non-positive rate");
    DecoherenceFit out;
    out.law = law;
    out.t_lo = t_lo;
    out.t_hi = t_hi;
    out.tau_d = power == 1 ? 1.0 / coef(0) : 1.0 / std::sqrt(coef(0));
    out.max_residual = ((design * coef - y).array() / y.array()).abs().maxCoeff();
    return out;
}

double equilibrium_wigner(const PhysicalConfig& c, double q, double p) {
    const auto e = equilibrium_moments(c);
    const double m = c.m();
    return std::exp(-p * p / (2.0 * m * m * e.v_sq) - q * q / (2.0 * e.x_sq)) /
           (2.0 * M_PI * m * std::sqrt(e.x_sq * e.v_sq));
}

ExactReference exact_reference(const InitialState& s, const PhysicalConfig& c, double t) {
    if (t < 0.0) throw DomainError("exact_reference: t < 0");
    s.validate();
    ExactReference out;
    out.t = t;
    const double sig2 = s.sigma * s.sigma;
    if (t > 0.0) {
        // C(t) = (2 hbar/pi) int Im alpha sin wt
        out.commutator = c.hbar() * green_numerical(c, t).g;
        out.s = msd(c, t).s;
    }
    out.w_sq = sig2 + out.s + out.commutator * out.commutator / (4.0 * sig2);
    if (s.pair()) out.a_exact = std::exp(-out.s * s.d * s.d / (8.0 * sig2 * out.w_sq));
    return out;
}

double exact_reference_density(const InitialState& s, const ExactReference& r, double x) {
    const double dx = x - s.x0;
    return std::exp(-dx * dx / (2.0 * r.w_sq)) / std::sqrt(2.0 * M_PI * r.w_sq);
}

}  // namespace hpz
