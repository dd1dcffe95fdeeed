#include "sojourn/analytic.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace sojourn;

namespace {

// Brute-force long-double sums of the level decomposition, 400 terms.
long double j_oracle(long double t, int p, long double a) {
    long double s = 0.0L;
    for (int n = 0; n < 400; ++n) s += std::pow((long double)p, -n) * std::exp(-std::pow((long double)p, -a * n) * t);
    return (1.0L - 1.0L / p) * s;
}

long double j_hat_oracle(long double s, int p, long double a) {
    long double sum = 0.0L;
    for (int n = 0; n < 400; ++n) sum += std::pow((long double)p, -n) / (s + std::pow((long double)p, -a * n));
    return (1.0L - 1.0L / p) * sum;
}

long double mean_oracle(long double t, int p, long double a) {
    long double s = 0.0L;
    for (int n = 0; n < 400; ++n) {
        const long double pn = std::pow((long double)p, -n);
        const long double lam = std::pow((long double)p, -a * n);
        s += pn * -std::expm1(-lam * t) / lam;
    }
    return (1.0L - 1.0L / p) * s;
}

const ModelParams p22(2, 2.0);
const ModelParams p205(2, 0.5);

}  // namespace

TEST_CASE("survival reference values") {
    CHECK(survival_j(0.0, p22) == 1.0);
    CHECK(survival_j(1.0, p22) == doctest::Approx(0.6199583).epsilon(2e-7));
    for (double t : {0.01, 0.3, 1.0, 7.0, 50.0, 1e3, 1e5}) {
        CAPTURE(t);
        CHECK(survival_j(t, p22) == doctest::Approx((double)j_oracle(t, 2, 2.0L)).epsilon(1e-12));
        CHECK(survival_j(t, p205) == doctest::Approx((double)j_oracle(t, 2, 0.5L)).epsilon(1e-12));
    }
}

TEST_CASE("survival decays like t^(-1/alpha)") {
    const SurvivalSeries series(p22);
    const double slope = std::log(series.survival(1e6) / series.survival(1e3)) / std::log(1e3);
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.04));
}

TEST_CASE("survival is a monotone probability") {
    for (const auto& params : {p22, p205, ModelParams(3, 1.0), ModelParams(5, 3.0)}) {
        const SurvivalSeries series(params);
        double prev = 1.0;
        for (double t = 0.0; t < 200.0; t += 0.37) {
            const double j = series.survival(t);
            CHECK(j >= 0.0);
            CHECK(j <= 1.0);
            CHECK(j <= prev);
            prev = j;
        }
    }
}

TEST_CASE("transform of the survival probability") {
    CHECK(j_hat(1.0, p22) == doctest::Approx(0.691547).epsilon(1.5e-5));
    for (double s : {1e-3, 0.1, 1.0, 10.0}) {
        CHECK(j_hat(s, p22) == doctest::Approx((double)j_hat_oracle(s, 2, 2.0L)).epsilon(1e-12));
        CHECK(j_hat(s, p22) < 1.0 / s);
    }
    CHECK(1e8 * j_hat(1e8, p22) == doctest::Approx(1.0).epsilon(1e-7));
    double prev = INFINITY;
    for (double s = 0.01; s < 100.0; s *= 1.7) {
        const double v = j_hat(s, p205);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(j_hat(0.0, p22), std::invalid_argument);
    CHECK_THROWS_AS(j_hat(-1.0, p22), std::invalid_argument);
}

TEST_CASE("first-return transform") {
    CHECK(f_hat(0.0, p22) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f_hat(0.0, p205) == doctest::Approx(3.0 * std::sqrt(2.0) - 4.0).epsilon(1e-10));
    // plug the oracle transform into 1 - 1/((B + s) J^(s))
    const double oracle = 1.0 - 1.0 / ((4.0 / 7.0 + 1.0) * (double)j_hat_oracle(1.0L, 2, 2.0L));
    CHECK(f_hat(1.0, p22) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(f_hat(1.0, p22) == doctest::Approx(0.07979).epsilon(1.3e-3));
    for (double s : {0.0, 1e-4, 0.1, 1.0, 30.0}) {
        for (const auto& params : {p22, p205}) {
            const double f = f_hat(s, params);
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
        }
    }
    CHECK_THROWS_AS(f_hat(-0.5, p22), std::invalid_argument);
}

TEST_CASE("excursion-count transforms") {
    CHECK(h_n_hat(0.7, 0, p22) == 1.0);
    CHECK(h_n_hat(0.0, 1, p22) == doctest::Approx(1.0).epsilon(1e-12));
    const double c = 3.0 * std::sqrt(2.0) - 4.0;
    CHECK(h_n_hat(0.0, 2, p205) == doctest::Approx(c * c).epsilon(1e-10));
    CHECK(h_n_hat(0.0, 2, p205) == doctest::Approx(0.058874).epsilon(1e-5));
    for (double s : {0.0, 0.01, 0.5, 4.0}) {
        const double h1 = h_n_hat(s, 1, p205);
        for (int n = 1; n <= 5; ++n) {
            const double hn = h_n_hat(s, n, p205);
            CHECK(hn == doctest::Approx(std::pow(h1, n)).epsilon(1e-13));
            CHECK(hn >= 0.0);
            CHECK(hn <= 1.0);
        }
        // h = f / g with g^(s) = B / (s + B)
        const double b = derive_constants(p205).b_alpha;
        CHECK(h1 == doctest::Approx(f_hat(s, p205) * (s + b) / b).epsilon(1e-12));
    }
    CHECK_THROWS_AS(h_n_hat(-1.0, 1, p22), std::invalid_argument);
}

TEST_CASE("inflow rate") {
    CHECK(v_rate(0.0, p22) == 0.0);
    CHECK(v_rate(1e9, p22) < 1e-4);
    const double h = 1e-5;
    for (double t : {0.5, 1.0, 3.0}) {
        const double dj = (survival_j(t + h, p22) - survival_j(t - h, p22)) / (2 * h);
        CHECK(v_rate(t, p22) == doctest::Approx(dj + 4.0 / 7.0 * survival_j(t, p22)).epsilon(1e-6));
    }
    for (double t = 0.0; t < 1e4; t = t * 1.5 + 0.1) CHECK(v_rate(t, p205) >= 0.0);
}

TEST_CASE("mean sojourn time") {
    CHECK(mean_sojourn(0.0, p22) == 0.0);
    CHECK(mean_sojourn(1.0, p22) == doctest::Approx(0.7828780).epsilon(1.3e-5));
    CHECK(mean_sojourn(0.01, p22) == doctest::Approx(0.01 - 4.0 / 7.0 * 5e-5).epsilon(1e-6));
    for (double t : {0.1, 1.0, 10.0, 1e4}) {
        CHECK(mean_sojourn(t, p22) == doctest::Approx((double)mean_oracle(t, 2, 2.0L)).epsilon(1e-12));
        CHECK(mean_sojourn(t, p205) == doctest::Approx((double)mean_oracle(t, 2, 0.5L)).epsilon(1e-12));
    }
    const SurvivalSeries series(p22);
    for (double t : {0.5, 2.0, 20.0}) {
        const double quad = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double u) { return series.survival(u); }, 0.0, t, 10, 1e-13);
        CHECK(series.mean_sojourn(t) == doctest::Approx(quad).epsilon(1e-8));
        CHECK(series.mean_sojourn(t) <= t);
    }
    double prev = 0.0;
    for (double t = 0.0; t < 1e3; t = 1.3 * t + 0.01) {
        const double m = mean_sojourn(t, p205);
        CHECK(m >= prev);
        prev = m;
    }
}

TEST_CASE("Erlang and Poisson weights") {
    const double t = 7.0 / 4.0;  // B t = 1
    CHECK(g_n_cdf(t, 1, p22) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-13));
    CHECK(g_n_cdf(t, 2, p22) == doctest::Approx(1.0 - 2.0 / std::exp(1.0)).epsilon(1e-13));
    CHECK(g_n_cdf(0.0, 5, p22) == 0.0);
    for (int n = 1; n < 8; ++n) CHECK(g_n_cdf(3.0, n + 1, p22) < g_n_cdf(3.0, n, p22));

    CHECK(poisson_weight(0, 0.0, p22) == 1.0);
    CHECK(poisson_weight(1, t, p22) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
    CHECK(poisson_weight(1, t, p22) == doctest::Approx(g_n_cdf(t, 1, p22) - g_n_cdf(t, 2, p22)).epsilon(1e-12));
    const double b = 4.0 / 7.0;
    for (double theta : {0.5, 5.0, 50.0}) {
        double total = 0.0;
        const int cut = poisson_cutoff(b * theta);
        for (int n = 0; n <= cut; ++n) total += poisson_weight(n, theta, p22);
        CHECK(std::abs(total - 1.0) < 1e-12);
    }
}

TEST_CASE("sojourn distribution function") {
    const SurvivalSeries series(p22);
    for (double t : {1.0, 5.0, 20.0}) {
        CHECK(sojourn_cdf(t, t, p22) == 1.0);
        double prev = 0.0;
        for (int k = 0; k <= 20; ++k) {
            const double theta = t * k / 20.0;
            const double phi = sojourn_cdf(theta, t, p22);
            CHECK(phi >= 0.0);
            CHECK(phi <= 1.0);
            CHECK(phi >= prev - 1e-7);
            prev = phi;
        }
        // int_0^t (1 - Phi) = mean sojourn
        const double quad = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            [&](double th) { return 1.0 - sojourn_cdf_report(th, t, series).value; }, 0.0, t, 6, 1e-9);
        CHECK(quad == doctest::Approx(series.mean_sojourn(t)).epsilon(1e-3));
    }
}

TEST_CASE("complement identity") {
    for (double t : {2.0, 10.0}) {
        for (double frac : {0.05, 0.3, 0.7, 0.95}) {
            const double theta = frac * t;
            CHECK(sojourn_cdf(theta, t, p22) ==
                  doctest::Approx(1.0 - sojourn_cdf_outside(t - theta, t, p22)).epsilon(1e-7));
        }
    }
}

TEST_CASE("series control validation") {
    CHECK_THROWS_AS(SurvivalSeries(p22, SeriesControl{0.0, 1e-14, 100}), std::invalid_argument);
    CHECK_THROWS_AS(SurvivalSeries(p22, SeriesControl{1e-15, 1e-14, 4}), std::invalid_argument);
    CHECK_THROWS_AS(survival_j(1.0, p22, SeriesControl{1e-300, 1e-300, 8}), NumericalError);
}
