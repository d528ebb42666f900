#include <doctest.h>

#include <cmath>

#include "hpz/error.hpp"
#include "hpz/quadrature.hpp"
#include "hpz/special.hpp"

using namespace hpz;

namespace {

// Defining integral int_0^inf x^2 (1 - cos y) / (y (y^2 + x^2)) dy, evaluated
// by oscillatory panel quadrature. Independent of the series / Ei branches.
double I_by_quadrature(double x) {
    return quad::integrate_oscillatory(
        [x](double y) {
            const double s = std::sin(0.5 * y);
            return x * x * 2.0 * s * s / (y * (y * y + x * x));
        },
        1.0, INFINITY, {x}, {1e-12, 1e-15});
}

}  // namespace

TEST_CASE("I(x) reference values") {
    CHECK(special_I(0.0) == 0.0);
    // high-precision values of log x + gamma - [e^{-x} Ei(x) - e^{x} E1(x)]/2
    CHECK(special_I(0.01) == doctest::Approx(0.000276400272433264453).epsilon(1e-12));
    CHECK(special_I(0.5) == doctest::Approx(0.207774651307817654).epsilon(1e-13));
    CHECK(special_I(1.0) == doctest::Approx(0.526801904445596863).epsilon(1e-13));
    CHECK(special_I(5.0) == doctest::Approx(2.13648153773247074).epsilon(1e-13));
    CHECK(special_I(10.0) == doctest::Approx(2.86900891462876720).epsilon(1e-13));
    CHECK(special_I(20.0) == doctest::Approx(3.57040831356368021).epsilon(1e-13));
    CHECK(special_I(50.0) == doctest::Approx(4.48883770251676436).epsilon(1e-13));
    CHECK_THROWS_AS(special_I(-1.0), DomainError);
}

TEST_CASE("I(x) matches its defining integral") {
    CHECK(I_by_quadrature(10.0) == doctest::Approx(2.8690).epsilon(1e-3 / 2.869));
    for (double x : {0.3, 1.7, 10.0, 33.0})
        CHECK(special_I(x) == doctest::Approx(I_by_quadrature(x)).epsilon(1e-8));
}

TEST_CASE("I(x) large-x correction") {
    const double x = 50.0;
    const double correction = special_I(x) - (std::log(x) + kEulerGamma);
    CHECK(correction == doctest::Approx(-1.0 / 2500.0).epsilon(0.01));
    CHECK(correction == doctest::Approx(-1.0 / 2500.0 - 6.0 / std::pow(50.0, 4)).epsilon(1e-3));
}

TEST_CASE("I(x) branches agree at their crossovers") {
    using namespace special_detail;
    for (double x = 0.8 * kSeriesLimit; x <= 1.2 * kSeriesLimit; x += 0.05) {
        CHECK(std::abs(I_series(x) - I_closed(x)) < 1e-12);
        CHECK(std::abs(I_prime_series(x) - I_prime_closed(x)) < 1e-12);
    }
    for (double x = 0.8 * kAsymptoticStart; x <= 1.2 * kAsymptoticStart; x += 1.0) {
        CHECK(std::abs(I_asymptotic(x) - I_closed(x)) < 1e-12);
        CHECK(std::abs(I_prime_asymptotic(x) - I_prime_closed(x)) < 1e-12);
    }
    // continuity of the dispatched function
    CHECK(std::abs(special_I(kSeriesLimit) - special_I(std::nextafter(kSeriesLimit, 3.0))) < 1e-12);
    CHECK(std::abs(special_I(std::nextafter(kAsymptoticStart, 0.0)) - special_I(kAsymptoticStart)) <
          1e-12);
}

TEST_CASE("I derivatives by finite differences") {
    for (double x : {0.2, 1.0, 1.99, 2.01, 7.0, 39.0, 41.0, 80.0}) {
        const double h = 1e-4 * x;
        const double d1 = (special_I(x + h) - special_I(x - h)) / (2 * h);
        const double d2 = (special_I(x + h) - 2 * special_I(x) + special_I(x - h)) / (h * h);
        CHECK(special_I_prime(x) == doctest::Approx(d1).epsilon(1e-7));
        CHECK(special_I_second(x) == doctest::Approx(d2).epsilon(2e-4));
    }
    CHECK(special_I_prime(0.0) == 0.0);
    CHECK_THROWS_AS(special_I_second(0.0), DivergenceError);
    // I'' ~ -log x near the origin
    CHECK(special_I_second(1e-6) == doctest::Approx(-std::log(1e-6) - kEulerGamma).epsilon(1e-3));
}
