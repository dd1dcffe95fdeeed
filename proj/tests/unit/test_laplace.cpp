#include "sojourn/analytic.hpp"
#include "sojourn/laplace.hpp"
#include "sojourn/transforms.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

using namespace sojourn;

namespace {

const ModelParams p22(2, 2.0);
const ModelParams p205(2, 0.5);

}  // namespace

TEST_CASE("method validation") {
    CHECK_THROWS_AS(InversionMethod::talbot(12).validate(), std::invalid_argument);
    CHECK_THROWS_AS(InversionMethod::stehfest(9).validate(), std::invalid_argument);
    CHECK_THROWS_AS(InversionMethod::stehfest(6).validate(), std::invalid_argument);
    CHECK_NOTHROW(InversionMethod::talbot(16).validate());
    CHECK_NOTHROW(InversionMethod::stehfest(8).validate());
    CHECK(InversionMethod::talbot().name() == "talbot");
    CHECK(InversionMethod::stehfest().name() == "stehfest");
    CHECK_THROWS_AS(talbot_nodes(0.0, 24), std::invalid_argument);
}

TEST_CASE("known transform pairs") {
    for (const auto& method : {InversionMethod::talbot(), InversionMethod::stehfest()}) {
        for (double t : {0.01, 1.0, 37.0}) {
            const auto r = invert(ComplexTransform([](std::complex<double> s) { return 1.0 / s; }), t, method);
            CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
            CHECK(std::isfinite(r.est_error));
        }
        const double b = 4.0 / 7.0;
        const auto g = invert(ComplexTransform([b](std::complex<double> s) { return b / (s + b); }), 1.0 / b, method);
        CHECK(g.value == doctest::Approx(b * std::exp(-1.0)).epsilon(1e-3));
    }
    const auto g = invert(ComplexTransform([](std::complex<double> s) { return (4.0 / 7.0) / (s + 4.0 / 7.0); }),
                          7.0 / 4.0, InversionMethod::talbot());
    CHECK(g.value == doctest::Approx(4.0 / 7.0 * std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("calibration on the survival pair") {
    for (const auto& params : {p22, ModelParams(3, 1.5), p205}) {
        const SurvivalSeries series(params);
        const ComplexTransform transform = [&](std::complex<double> s) { return series.transform(s); };
        for (double t = 0.1; t <= 100.0; t *= 1.25) {
            const auto r = invert(transform, t, InversionMethod::talbot());
            CHECK(r.value == doctest::Approx(series.survival(t)).epsilon(1e-5));
        }
    }
    const SurvivalSeries series(p22);
    CHECK(invert(ComplexTransform([&](std::complex<double> s) { return series.transform(s); }), 1.0,
                 InversionMethod::talbot())
              .value == doctest::Approx(0.6199583).epsilon(1e-6));
}

TEST_CASE("failed order agreement is reported") {
    // a step at t = 1 cannot be resolved by a smooth-kernel inversion
    const ComplexTransform step = [](std::complex<double> s) { return std::exp(-s) / s; };
    CHECK_THROWS_AS(invert(step, 1.0, InversionMethod::talbot(16, 12.0)), NumericalError);
    const auto r = invert_unchecked(step, 1.0, InversionMethod::talbot(16, 12.0));
    CHECK(r.est_error > 1e-12);
    CHECK_THROWS_AS(invert(ComplexTransform([](std::complex<double>) { return std::complex<double>(NAN, 0.0); }), 1.0,
                           InversionMethod::talbot()),
                    NumericalError);
}

TEST_CASE("real-axis and contour methods agree on the first-return density") {
    const SurvivalSeries series(p22);
    for (double t : {0.5, 1.0, 3.0, 10.0, 30.0, 100.0}) {
        const auto a = first_return_density(t, series, InversionMethod::talbot());
        const auto b = first_return_density(t, series, InversionMethod::stehfest(14, 3.0));
        CAPTURE(t);
        CHECK(std::abs(a.value - b.value) <= 2.0 * (a.est_error + b.est_error) + 1e-12);
    }
}

TEST_CASE("first-return density") {
    const SurvivalSeries s22(p22);
    // density tail slope -(2 alpha - 1) / alpha
    const double lo = first_return_density(1e2, s22).value;
    const double hi = first_return_density(1e5, s22).value;
    CHECK(std::log(hi / lo) / std::log(1e3) == doctest::Approx(-1.5).epsilon(0.06));
    // total return probability: 1 for alpha >= 1, C_alpha otherwise
    CHECK(first_return_cdf(1e6, s22).value > 0.99);
    const SurvivalSeries s205(p205);
    CHECK(first_return_cdf(1e6, s205).value == doctest::Approx(3.0 * std::sqrt(2.0) - 4.0).epsilon(2e-2));
    for (double t = 0.01; t < 1e4; t *= 3.0) CHECK(first_return_density(t, s205).value >= 0.0);
}

TEST_CASE("excursion laws") {
    const SurvivalSeries s22(p22);
    const SurvivalSeries s205(p205);
    const double c = 3.0 * std::sqrt(2.0) - 4.0;
    CHECK(h_n_time(1e6, 1, s22).cdf == doctest::Approx(1.0).epsilon(2e-2));
    CHECK(h_n_time(1e6, 1, s205).cdf == doctest::Approx(c).epsilon(2e-2));
    CHECK(h_n_time(1e6, 2, s205).cdf == doctest::Approx(c * c).epsilon(3e-2));

    double prev = 0.0;
    for (double t = 0.05; t < 1e4; t *= 2.0) {
        const auto law = h_n_time(t, 1, s22);
        CHECK(law.cdf >= prev - law.est_error);
        CHECK(law.cdf <= 1.0 + law.est_error);
        prev = law.cdf;
    }
    // density integrates to the distribution function; split at the early peak
    auto density = [&](double t) { return t <= 0.0 ? 0.0 : h_n_time(t, 1, s22).density; };
    using boost::math::quadrature::gauss_kronrod;
    double integral = gauss_kronrod<double, 31>::integrate(density, 0.0, 10.0, 8, 1e-9);
    integral += gauss_kronrod<double, 31>::integrate(density, 10.0, 1e3, 8, 1e-9);
    CHECK(integral == doctest::Approx(h_n_time(1e3, 1, s22).cdf).epsilon(1e-3));
    CHECK_THROWS_AS(h_n_time(1.0, 0, s22), std::invalid_argument);
}
