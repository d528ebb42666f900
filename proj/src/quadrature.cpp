#include "hpz/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hpz/error.hpp"

namespace hpz::quad {

namespace {

constexpr std::size_t kMaxSegments = 4000;

void check(double error, double l1, Tolerance tol, const char* who) {
    const double target = std::max(tol.rel * l1, tol.abs);
    if (!std::isfinite(error) || (error > 1e3 * target && error > 1e-7 * l1 && error > tol.abs))
        throw QuadratureError(std::string(who) + ": adaptive quadrature did not converge", error);
}

}  // namespace

double integrate(const Integrand& f, double a, double b, Tolerance tol) {
    if (a == b) return 0.0;
    // Globally adaptive: bisect the segment with the largest error until the
    // total meets max(rel * L1, abs). Boost's own recursion works to a purely
    // relative local tolerance, which never terminates on stretches where the
    // integrand is rounding noise around zero.
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    struct Segment {
        double a, b, value, error, l1;
        bool operator<(const Segment& o) const { return error < o.error; }
    };
    auto rule = [&](double lo, double hi) {
        const double h = hi - lo;
        double error = 0.0, l1 = 0.0;
        // the rule's error is reported for [-1, 1] without the Jacobian
        const double v = GK::integrate([&](double x) { return f(lo + h * x); }, 0.0, 1.0, 0, 0.0, &error, &l1);
        return Segment{lo, hi, h * v, std::abs(h) * error, std::abs(h) * l1};
    };
    std::priority_queue<Segment> heap;
    Segment first = rule(a, b);
    double value = first.value, error = first.error, l1 = first.l1;
    heap.push(first);
    for (std::size_t n = 1; n < kMaxSegments; ++n) {
        if (!std::isfinite(error)) break;
        const double target = std::max({tol.rel * l1, tol.abs, 50.0 * std::numeric_limits<double>::epsilon() * l1});
        if (error <= target) break;
        const Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) break;
        heap.pop();
        const Segment left = rule(worst.a, mid), right = rule(mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
    }
    check(error, l1, tol, "integrate");
    return value;
}

double integrate_panels(const Integrand& f, const std::vector<double>& points, Tolerance tol) {
    double sum = 0.0;
    for (std::size_t k = 1; k < points.size(); ++k) sum += integrate(f, points[k - 1], points[k], tol);
    return sum;
}

double integrate_to_infinity(const Integrand& f, double a, Tolerance tol) {
    boost::math::quadrature::exp_sinh<double> integrator;
    double error = 0.0, l1 = 0.0;
    const double v = integrator.integrate(f, a, std::numeric_limits<double>::infinity(), tol.rel,
                                          &error, &l1);
    check(error, l1, tol, "integrate_to_infinity");
    return v;
}

double wynn_epsilon(const std::vector<double>& s) {
    const std::size_t n = s.size();
    if (n < 3) return n ? s.back() : 0.0;
    // e_prev holds column k-1, e_cur column k; both indexed by sequence position.
    std::vector<double> e_prev(n + 1, 0.0), e_cur(s.begin(), s.end());
    double best = s.back();
    for (std::size_t k = 1; k < n; ++k) {
        const std::size_t len = n - k;
        std::vector<double> e_next(len);
        bool ok = true;
        for (std::size_t j = 0; j < len; ++j) {
            const double diff = e_cur[j + 1] - e_cur[j];
            if (diff == 0.0 || !std::isfinite(diff)) {
                ok = false;
                break;
            }
            e_next[j] = e_prev[j + 1] + 1.0 / diff;
        }
        if (!ok) break;
        e_prev.assign(e_cur.begin(), e_cur.end());
        e_cur = std::move(e_next);
        if (k % 2 == 0 && std::isfinite(e_cur.back())) best = e_cur.back();
    }
    return best;
}

std::vector<double> spectral_breakpoints(double upper, const std::vector<double>& features) {
    std::vector<double> pts{0.0, upper};
    static constexpr double kFactors[] = {1e-3, 1e-2, 0.1, 0.5, 0.9, 0.99, 1.0, 1.01,
                                          1.1,  2.0,  10.0, 100.0};
    for (double f : features) {
        if (!(f > 0.0)) continue;
        for (double k : kFactors)
            if (k * f < upper) pts.push_back(k * f);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

namespace {

// Region [0, head_end] resolved by feature breakpoints and tiled in half periods.
double oscillatory_head(const Integrand& f, double t, double head_end, const std::vector<double>& features,
                        Tolerance tol) {
    const double half = M_PI / t;
    std::vector<double> pts = spectral_breakpoints(head_end, features);
    for (double a = half; a < head_end; a += half) pts.push_back(a);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, std::abs(b)); }),
              pts.end());
    return integrate_panels(f, pts, tol);
}

double head_end_for(double t, double upper, const std::vector<double>& features, double scale) {
    if (!(scale > 0.0))
        for (double v : features) scale = std::max(scale, v);
    const double period = 2.0 * M_PI / t;
    return std::min(upper, period * std::ceil(std::max(4.0 * scale, period) / period));
}

// int_a^inf of a purely oscillating integrand (zero mean over a period):
// half-period partial sums alternate and Wynn's epsilon converges quickly.
double pure_tail(const Integrand& f, double t, double a, Tolerance tol) {
    const double half = M_PI / t;
    constexpr std::size_t kMaxPanels = 200000, kWindow = 24;
    std::vector<double> partial;
    double sum = 0.0, mag = 0.0, previous = std::numeric_limits<double>::quiet_NaN();
    double best_gap = std::numeric_limits<double>::infinity();
    int agreed = 0;
    for (std::size_t k = 0; k < kMaxPanels; ++k, a += half) {
        const double v = integrate(f, a, a + half, tol);
        sum += v;
        mag += std::abs(v);
        partial.push_back(sum);
        if (partial.size() < 8 || partial.size() % 2) continue;
        const std::size_t w = std::min(kWindow, partial.size());
        const double est = wynn_epsilon(std::vector<double>(partial.end() - w, partial.end()));
        const double gap = std::abs(est - previous);
        const double target = std::max({tol.rel * std::abs(est), tol.abs,
                                        64.0 * std::numeric_limits<double>::epsilon() * mag});
        agreed = gap <= target ? agreed + 1 : 0;
        if (agreed >= 2) return est;
        best_gap = std::min(best_gap, gap);
        previous = est;
    }
    throw QuadratureError("integrate_oscillatory: oscillatory tail did not converge", best_gap);
}

// int_a^b of a purely oscillating integrand, b possibly infinite.
double pure_range(const Integrand& f, double t, double a, double b, Tolerance tol) {
    if (!(b > a)) return 0.0;
    const double half = M_PI / t;
    if (!std::isfinite(b)) return pure_tail(f, t, a, tol);
    if ((b - a) / half > 4096.0) return pure_tail(f, t, a, tol) - pure_tail(f, t, b, tol);
    double sum = 0.0;
    for (double x = a; x < b; x += half) sum += integrate(f, x, std::min(x + half, b), tol);
    return sum;
}

// int_a^b of a smooth (non-oscillating) integrand, b possibly infinite.
double smooth_range(const Integrand& f, double a, double b, Tolerance tol) {
    if (!(b > a)) return 0.0;
    if (!std::isfinite(b)) return integrate_to_infinity(f, a, tol);
    std::vector<double> pts{a};
    for (double x = 2.0 * a; x < b; x *= 2.0) pts.push_back(x);
    pts.push_back(b);
    return integrate_panels(f, pts, tol);
}

}  // namespace

double integrate_oscillatory(const Integrand& f, double t, double upper,
                             const std::vector<double>& features, Tolerance tol, Oscillation kind,
                             double head_scale) {
    const bool infinite = !std::isfinite(upper);
    double scale = 0.0;
    for (double v : features) scale = std::max(scale, v);
    if (t <= 0.0) {
        if (!infinite) return integrate_panels(f, spectral_breakpoints(upper, features), tol);
        const double split = 100.0 * scale;
        return integrate_panels(f, spectral_breakpoints(split, features), tol) +
               integrate_to_infinity(f, split, tol);
    }

    const double half = M_PI / t;
    const double period = 2.0 * half;
    const double head_end = head_end_for(t, upper, features, head_scale);
    double sum = oscillatory_head(f, t, head_end, features, tol);
    if (kind == Oscillation::Pure) return sum + pure_range(f, t, head_end, upper, tol);
    if (!infinite) {
        for (double a = head_end; a < upper; a += half) sum += integrate(f, a, std::min(a + half, upper), tol);
        return sum;
    }

    // Tail in blocks [y_j, 2 y_j] of whole periods. Averaged over periods the
    // integrand is smooth in y, so the block sums converge geometrically and
    // epsilon extrapolation removes the power-law remainder.
    constexpr int kMaxBlocks = 22;
    constexpr std::size_t kMaxPeriods = std::size_t{1} << 22;
    std::vector<double> partial{sum};
    double mag = std::abs(sum), previous = std::numeric_limits<double>::quiet_NaN();
    double best_gap = std::numeric_limits<double>::infinity();
    std::size_t periods = static_cast<std::size_t>(std::llround(head_end / period));
    double y = head_end;
    for (int j = 0; j < kMaxBlocks && periods <= kMaxPeriods; ++j) {
        double block = 0.0;
        for (std::size_t i = 0; i < periods; ++i, y += period) {
            const double v = integrate(f, y, y + half, tol) + integrate(f, y + half, y + period, tol);
            block += v;
            mag += std::abs(v);
        }
        periods *= 2;
        partial.push_back(partial.back() + block);
        if (block == 0.0) return partial.back();
        if (partial.size() < 4) continue;
        const double est = wynn_epsilon(partial);
        const double gap = std::abs(est - previous);
        const double target = std::max({tol.rel * std::abs(est), tol.abs,
                                        64.0 * std::numeric_limits<double>::epsilon() * mag});
        if (gap <= target) return est;
        best_gap = std::min(best_gap, gap);
        previous = est;
    }
    throw QuadratureError("integrate_oscillatory: tail did not converge", best_gap);
}

double integrate_split(const Integrand& f, const Integrand& smooth, const Integrand& oscillating,
                       double t, double upper, const std::vector<double>& features, Tolerance tol,
                       double head_scale) {
    if (t <= 0.0) return integrate_oscillatory(f, t, upper, features, tol);
    const double head_end = head_end_for(t, upper, features, head_scale);
    const double head = oscillatory_head(f, t, head_end, features, tol);
    // The split parts may each carry rounding noise from cancellation in the
    // caller's algebra; they only need to be accurate relative to the total.
    const Tolerance tail_tol{tol.rel, std::max(tol.abs, 1e-3 * tol.rel * std::abs(head))};
    return head + smooth_range(smooth, head_end, upper, tail_tol) +
           pure_range(oscillating, t, head_end, upper, tail_tol);
}

}  // namespace hpz::quad
