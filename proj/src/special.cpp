#include "hpz/special.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/expint.hpp>

#include "hpz/error.hpp"

namespace hpz {

namespace special_detail {

namespace {

// S+(x) = sum x^n/(n! n), S-(x) = sum (-x)^n/(n! n)
void exponential_sums(double x, double& plus, double& minus) {
    plus = 0.0;
    minus = 0.0;
    double power = 1.0;  // x^n / n!
    for (int n = 1; n < 200; ++n) {
        power *= x / n;
        const double term = power / n;
        plus += term;
        minus += (n % 2 ? -term : term);
        if (term < 1e-18 * std::abs(plus)) break;
    }
}

}  // namespace

double I_series(double x) {
    if (x == 0.0) return 0.0;
    double plus, minus;
    exponential_sums(x, plus, minus);
    // cosh x - 1 without cancellation
    const double s = std::sinh(0.5 * x);
    const double cosh_m1 = 2.0 * s * s;
    return -(std::log(x) + kEulerGamma) * cosh_m1 -
           0.5 * (std::exp(-x) * plus + std::exp(x) * minus);
}

double I_closed(double x) {
    const double ei = boost::math::expint(x);      // Ei(x), principal value
    const double e1 = boost::math::expint(1, x);   // E1(x) = -Ei(-x)
    return std::log(x) + kEulerGamma - 0.5 * (std::exp(-x) * ei - std::exp(x) * e1);
}

double I_asymptotic(double x) {
    // log x + gamma - sum_{k>=1} (2k-1)!/x^{2k}, truncated at the smallest term
    const double inv2 = 1.0 / (x * x);
    double term = inv2;  // 1!/x^2
    double sum = 0.0;
    double last = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        if (term >= last) break;
        sum += term;
        last = term;
        term *= (2.0 * k) * (2.0 * k + 1.0) * inv2;
    }
    return std::log(x) + kEulerGamma - sum;
}

double I_prime_series(double x) {
    double plus, minus;
    exponential_sums(x, plus, minus);
    return -std::sinh(x) * (std::log(x) + kEulerGamma) +
           0.5 * (std::exp(-x) * plus - std::exp(x) * minus);
}

double I_prime_closed(double x) {
    return 0.5 * (std::exp(-x) * boost::math::expint(x) + std::exp(x) * boost::math::expint(1, x));
}

double I_prime_asymptotic(double x) {
    // sum_{k>=0} (2k)!/x^{2k+1}
    const double inv2 = 1.0 / (x * x);
    double term = 1.0 / x;
    double sum = 0.0;
    double last = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 200; ++k) {
        if (term >= last) break;
        sum += term;
        last = term;
        term *= (2.0 * k + 1.0) * (2.0 * k + 2.0) * inv2;
    }
    return sum;
}

}  // namespace special_detail

double special_I(double x) {
    using namespace special_detail;
    if (x < 0.0 || std::isnan(x)) throw DomainError("special_I: x < 0");
    if (x <= kSeriesLimit) return I_series(x);
    if (x < kAsymptoticStart) return I_closed(x);
    return I_asymptotic(x);
}

double special_I_prime(double x) {
    using namespace special_detail;
    if (x < 0.0 || std::isnan(x)) throw DomainError("special_I_prime: x < 0");
    if (x == 0.0) return 0.0;
    if (x <= kSeriesLimit) return I_prime_series(x);
    if (x < kAsymptoticStart) return I_prime_closed(x);
    return I_prime_asymptotic(x);
}

double special_I_second(double x) {
    if (!(x > 0.0)) throw DivergenceError("special_I_second: I''(x) ~ -log x diverges at x = 0");
    return special_I(x) - std::log(x) - kEulerGamma;
}

}  // namespace hpz
