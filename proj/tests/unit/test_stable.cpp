#include "sojourn/stable.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace sojourn;

namespace {

double levy_density(double t) { return 0.5 * std::pow(t, -1.5) * std::exp(-std::numbers::pi / (4.0 * t)); }

}  // namespace

TEST_CASE("Levy closed form at gamma = 1/2") {
    CHECK(stable_density_series(1.0, 0.5) == doctest::Approx(0.5 * std::exp(-std::numbers::pi / 4.0)).epsilon(1e-12));
    CHECK(stable_density_series(1.0, 0.5) == doctest::Approx(0.2279691).epsilon(5e-7));
    CHECK(stable_density_series(4.0, 0.5) == doctest::Approx(0.0513578).epsilon(2e-6));
    CHECK(stable_density_quadrature(1.0, 0.5) == doctest::Approx(0.2279691).epsilon(5e-7));
    CHECK(std::abs(stable_density_quadrature(0.1, 0.5) - levy_density(0.1)) < 1e-12);
    CHECK(stable_density_quadrature(0.1, 0.5) == doctest::Approx(0.006136).epsilon(1e-3));
    for (double t : {0.5, 0.8, 1.5, 3.0, 10.0, 100.0}) {
        CHECK(std::abs(stable_density_series(t, 0.5) - levy_density(t)) < 1e-10);
        CHECK(std::abs(stable_density_quadrature(t, 0.5) - levy_density(t)) < 1e-10);
    }
    // F(y) = erfc(sqrt(pi / (4 y)))
    for (double y : {0.2, 1.0, 5.0, 50.0}) {
        CHECK(stable_cdf(y, 0.5) == doctest::Approx(std::erfc(std::sqrt(std::numbers::pi / (4.0 * y)))).epsilon(1e-8));
    }
}

TEST_CASE("series and contour quadrature agree") {
    for (double gamma : {0.25, 0.5, 0.75}) {
        for (double t : {0.5, 0.7, 1.0, 2.0, 5.0, 20.0, 1e3}) {
            CAPTURE(gamma);
            CAPTURE(t);
            const double s = stable_density_series(t, gamma);
            const double q = stable_density_quadrature(t, gamma);
            CHECK(std::abs(s - q) < 1e-10);
            CHECK(s >= 0.0);
        }
    }
}

TEST_CASE("leading large-t term") {
    for (double gamma : {0.25, 0.5, 0.75}) {
        const double lead = std::tgamma(1.0 - gamma) * std::sin(std::numbers::pi * gamma) *
                            std::tgamma(gamma + 1.0) / std::numbers::pi;
        // next term is smaller by a factor of order t^-gamma
        const double t = std::pow(10.0, 4.0 / gamma);
        CHECK(stable_density_series(t, gamma) / (lead * std::pow(t, -gamma - 1.0)) == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("density normalization") {
    for (double gamma : {0.25, 0.5, 0.75}) {
        CAPTURE(gamma);
        CHECK(std::abs(stable_normalization(gamma) - 1.0) < 1e-6);
    }
}

TEST_CASE("distribution function is monotone") {
    for (double gamma : {0.25, 0.5, 0.75}) {
        double prev = 0.0;
        for (double y = 0.05; y < 1e4; y *= 1.6) {
            const double f = stable_cdf(y, gamma);
            CHECK(f >= prev - 1e-9);
            CHECK(f <= 1.0);
            prev = f;
        }
        CHECK(stable_cdf(0.0, gamma) == 0.0);
    }
}

TEST_CASE("argument checks") {
    CHECK_THROWS_AS(stable_density_series(0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(stable_density_series(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(stable_density_quadrature(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(stable_density_quadrature(1.0, 0.0), std::invalid_argument);
    CHECK(stable_contour_angle(0.5) < 0.0);
    CHECK(stable_contour_angle(0.25) == doctest::Approx(-std::numbers::pi / 2.0));
}
