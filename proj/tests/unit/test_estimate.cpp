#include "sojourn/estimate.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace sojourn;

namespace {

std::vector<double> normal_samples(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(3.0, 2.0);
    std::vector<double> out(n);
    for (double& x : out) x = dist(rng);
    return out;
}

}  // namespace

TEST_CASE("estimate from samples") {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const auto e = Estimate::from_samples(xs);
    CHECK(e.value == 2.5);
    CHECK(e.n == 4);
    // sample sd sqrt(5/3), divided by sqrt(4)
    CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(e.within(2.5 + 0.9 * e.std_error, 1.0));
    CHECK_FALSE(e.within(2.5 + 3.1 * e.std_error));
    CHECK(Estimate::from_samples(std::vector<double>{}).n == 0);
}

TEST_CASE("merge equals the pooled estimate in any order") {
    const auto xs = normal_samples(100000, 5);
    const auto whole = Estimate::from_samples(xs);
    const std::span<const double> all(xs);
    const auto a = Estimate::from_samples(all.subspan(0, 123));
    const auto b = Estimate::from_samples(all.subspan(123, 40000));
    const auto c = Estimate::from_samples(all.subspan(40123));
    const auto left = merge(merge(a, b), c);
    const auto right = merge(a, merge(b, c));
    const auto swapped = merge(c, merge(b, a));
    for (const auto& m : {left, right, swapped}) {
        CHECK(m.n == whole.n);
        CHECK(m.value == doctest::Approx(whole.value).epsilon(1e-13));
        CHECK(m.std_error == doctest::Approx(whole.std_error).epsilon(1e-12));
    }
    CHECK(merge(Estimate{}, a).value == a.value);
}

TEST_CASE("power-law fit") {
    std::vector<double> x, y;
    for (int i = 0; i < 8; ++i) {
        x.push_back(std::pow(10.0, i));
        y.push_back(3.0 * std::pow(x.back(), -0.75));
    }
    const auto fit = fit_power_law(x, y);
    CHECK(fit.slope == doctest::Approx(-0.75).epsilon(1e-13));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK(fit.slope_stderr < 1e-7);
    CHECK(fit.x_lo == 1.0);
    CHECK(fit.x_hi == 1e7);
    CHECK(fit.points == 8);

    CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 2, 3, 4}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_power_law(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{1, 2, 0, 4, 5}),
                    std::invalid_argument);
}

TEST_CASE("log grid") {
    const auto g = log_grid(1e2, 1e5, 4);
    REQUIRE(g.size() == 4);
    CHECK(g[0] == 1e2);
    CHECK(g[1] == doctest::Approx(1e3));
    CHECK(g[3] == 1e5);
    CHECK_THROWS_AS(log_grid(0.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(log_grid(1.0, 2.0, 1), std::invalid_argument);
}

TEST_CASE("parallel_for visits each index once and propagates errors") {
    for (unsigned threads : {1u, 2u, 7u}) {
        std::vector<std::atomic<int>> hits(1000);
        parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i].fetch_add(1); });
        for (const auto& h : hits) CHECK(h.load() == 1);
        CHECK_THROWS_AS(parallel_for(100, threads,
                                     [](std::size_t i) {
                                         if (i == 37) throw std::runtime_error("boom");
                                     }),
                        std::runtime_error);
    }
}

TEST_CASE("Kolmogorov-Smirnov distance") {
    const std::vector<double> xs{0.1, 0.2, 0.3, 0.4};
    // against U(0, 1): largest gap is at x = 0.4 where F_n = 1 and F = 0.4
    CHECK(ks_distance(xs, [](double x) { return x; }) == doctest::Approx(0.6));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> big(20000);
    for (double& x : big) x = u(rng);
    CHECK(ks_distance(big, [](double x) { return x; }) < ks_critical_1pct(big.size()));
    // an atom is compared against the left limit of the distribution function
    const std::vector<double> atom(10, 1.0);
    CHECK(ks_distance(atom, [](double x) { return x >= 1.0 ? 1.0 : 0.5; }, [](double) { return 0.5; }) ==
          doctest::Approx(0.5));
    CHECK(ks_critical_1pct(10000) == doctest::Approx(0.01628));
    CHECK_THROWS_AS(ks_distance({}, [](double x) { return x; }), std::invalid_argument);
}
