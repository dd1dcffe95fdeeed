#include "sojourn/analytic.hpp"
#include "sojourn/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace sojourn;

namespace {

const ModelParams p22(2, 2.0);
const ModelParams p205(2, 0.5);

}  // namespace

TEST_CASE("first moment at t = 1") {
    const auto e = estimate_moment(p22, 1.0, 1.0, 100000, 1);
    CHECK(e.within(0.7828780, 3.0));
    CHECK(e.n == 100000);
    CHECK_THROWS_AS(estimate_moment(p22, 1.0, 1.0, 99, 1), std::invalid_argument);
}

TEST_CASE("short times are spent inside the ball") {
    const auto e = estimate_moment(p22, 1e-3, 1.0, 1000, 2);
    CHECK(e.value / 1e-3 == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("ensembles do not depend on the thread count") {
    const std::vector<double> times{0.5, 5.0, 50.0};
    const auto one = sojourn_samples(p22, times, 500, 9, {1, 40});
    const auto many = sojourn_samples(p22, times, 500, 9, {4, 40});
    CHECK(one == many);
}

TEST_CASE("predicted moment exponents") {
    CHECK(predicted_moment_exponent(p22, 1.0) == doctest::Approx(0.5));
    CHECK(predicted_moment_exponent(p22, 2.0) == doctest::Approx(1.0));
    CHECK(predicted_moment_exponent(p22, 3.0) == doctest::Approx(2.0));
    const ModelParams p3(2, 3.0);
    // both regimes meet at beta = alpha / (alpha - 1)
    CHECK(predicted_moment_exponent(p3, 1.5 - 1e-12) == doctest::Approx(predicted_moment_exponent(p3, 1.5)));
}

TEST_CASE("moment scaling report flags and annotates") {
    const auto grid = log_grid(1e2, 1e4, 6);
    const std::vector<double> betas{1.0, 3.0};
    const auto report = moment_scaling_report(p22, betas, grid, 2000, 4);
    REQUIRE(report.size() == 2);
    CHECK(report[0].predicted_slope == doctest::Approx(0.5));
    CHECK(report[1].predicted_slope == doctest::Approx(2.0));
    CHECK(report[0].fit.slope == doctest::Approx(0.5).epsilon(0.1));
    CHECK(report[0].times.size() == grid.size());
    CHECK_THROWS_AS(moment_scaling_report(p205, betas, grid, 2000, 4), std::invalid_argument);
}

TEST_CASE("ODE oracle") {
    const std::vector<double> grid{0.0, 1.0, 10.0, 50.0};
    const auto a = ode_survival_oracle(NormChainGenerator(p22, 40), grid);
    const auto b = ode_survival_oracle(NormChainGenerator(p22, 20), grid);
    CHECK(a[0].p0 == 1.0);
    CHECK(a[1].p0 == doctest::Approx(0.61996).epsilon(1e-4));
    CHECK(std::abs(a[3].p0 - b[3].p0) < 1e-6);
    const SurvivalSeries series(p22);
    for (const auto& pt : a) CHECK(std::abs(pt.p0 - series.survival(pt.t)) < 1e-4);
}

TEST_CASE("Volterra residual") {
    const std::vector<double> grid{0.5, 1.0, 2.0, 5.0, 10.0};
    CHECK(volterra_residual(p22, grid).max_abs_residual < 1e-3);
    const std::vector<double> grid2{1.0, 5.0, 10.0};
    CHECK(volterra_residual(p205, grid2).max_abs_residual < 1e-3);
    const std::vector<double> tiny{1e-6};
    CHECK(std::abs(volterra_residual(p22, tiny).max_abs_residual) < 1e-6);
}

TEST_CASE("transience") {
    const auto e = never_returned_fraction(p205, 1e6, 20000, 12, {0, 80});
    CHECK(e.within(5.0 - 3.0 * std::sqrt(2.0), 3.0));
}

TEST_CASE("log-corrected tail at alpha = 1") {
    const auto r = first_return_tail(ModelParams(2, 1.0), 1e5, 10000, 14, 1e2, 1e5, 8);
    CHECK(r.fit.slope > -0.2);
    CHECK(r.fit.slope < 0.0);
}

TEST_CASE("sojourn distribution against simulation") {
    const auto r = sojourn_cdf_ks(p22, 10.0, 5000, 15);
    CHECK(r.ks_distance < r.critical);
    CHECK(r.n == 5000);
}

TEST_CASE("limit law") {
    CHECK_THROWS_AS(limit_law_check(p205, 1e4, 1000, 1), std::invalid_argument);
    double prev = 0.0;
    for (double x = 0.05; x < 50.0; x *= 1.5) {
        const double f = limit_law_cdf(x, 0.9, p22);
        CHECK(f >= prev - 1e-9);
        CHECK(f <= 1.0);
        prev = f;
    }
    const auto r = limit_law_check(p22, 1e4, 3000, 16);
    CHECK(r.gamma == doctest::Approx(0.5));
    CHECK(r.ks_distance < 0.05);
}
