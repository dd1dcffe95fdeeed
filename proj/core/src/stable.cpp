#include "sojourn/stable.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sojourn {

namespace {

void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("stable law: gamma must lie in (0, 1)");
}

/// log |n-th series term| without the sin factor.
double log_term(int n, double gamma, double log_a, double log_t) {
    const double ng = n * gamma;
    return n * log_a + std::lgamma(ng + 1.0) - std::lgamma(n + 1.0) - (ng + 1.0) * log_t;
}

struct Mpfr {
    mpfr_t v;
    explicit Mpfr(mpfr_prec_t bits) { mpfr_init2(v, bits); }
    ~Mpfr() { mpfr_clear(v); }
    Mpfr(const Mpfr&) = delete;
    Mpfr& operator=(const Mpfr&) = delete;
};

}  // namespace

double stable_density_series(double t, double gamma, const StableSeriesOptions& options) {
    check_gamma(gamma);
    options.ctrl.validate();
    if (!(t >= options.min_t) || !std::isfinite(t)) {
        throw std::invalid_argument("stable_density_series: t below the series domain (use quadrature)");
    }
    const double log_a = std::lgamma(1.0 - gamma);
    const double log_t = std::log(t);
    const double log_stop = std::log(options.ctrl.abs_tol * std::numbers::pi);

    // Scan magnitudes in double to find the peak and the stopping index.
    double peak = -INFINITY;
    double prev = -INFINITY;
    int last = 0;
    for (int n = 1; n <= options.ctrl.max_terms; ++n) {
        const double lt = log_term(n, gamma, log_a, log_t);
        peak = std::max(peak, lt);
        if (lt < prev && lt < log_stop) {
            last = n;
            break;
        }
        prev = lt;
    }
    if (last == 0) throw NumericalError("stable_density_series: terms did not decay within max_terms");

    const auto digits = std::max(30.0, std::ceil(peak / std::log(10.0)) + 30.0);
    const auto bits = static_cast<mpfr_prec_t>(std::ceil(digits * 3.33)) + 16;
    Mpfr a(bits), g(bits), pi(bits), log_t_mp(bits), sum(bits), a_pow(bits), fact(bits), ng(bits), term(bits),
        tmp(bits);
    mpfr_set_d(g.v, gamma, MPFR_RNDN);
    mpfr_ui_sub(a.v, 1, g.v, MPFR_RNDN);
    mpfr_gamma(a.v, a.v, MPFR_RNDN);
    mpfr_const_pi(pi.v, MPFR_RNDN);
    mpfr_set_d(log_t_mp.v, t, MPFR_RNDN);
    mpfr_log(log_t_mp.v, log_t_mp.v, MPFR_RNDN);
    mpfr_set_ui(sum.v, 0, MPFR_RNDN);
    mpfr_set_ui(a_pow.v, 1, MPFR_RNDN);
    mpfr_set_ui(fact.v, 1, MPFR_RNDN);
    for (int n = 1; n <= last; ++n) {
        mpfr_mul(a_pow.v, a_pow.v, a.v, MPFR_RNDN);
        mpfr_mul_ui(fact.v, fact.v, static_cast<unsigned long>(n), MPFR_RNDN);
        mpfr_mul_ui(ng.v, g.v, static_cast<unsigned long>(n), MPFR_RNDN);
        // sin(n gamma pi)
        mpfr_mul(term.v, ng.v, pi.v, MPFR_RNDN);
        mpfr_sin(term.v, term.v, MPFR_RNDN);
        mpfr_mul(term.v, term.v, a_pow.v, MPFR_RNDN);
        // Gamma(n gamma + 1) / n!
        mpfr_add_ui(tmp.v, ng.v, 1, MPFR_RNDN);
        mpfr_gamma(tmp.v, tmp.v, MPFR_RNDN);
        mpfr_mul(term.v, term.v, tmp.v, MPFR_RNDN);
        mpfr_div(term.v, term.v, fact.v, MPFR_RNDN);
        // t^{-(n gamma + 1)}
        mpfr_add_ui(tmp.v, ng.v, 1, MPFR_RNDN);
        mpfr_mul(tmp.v, tmp.v, log_t_mp.v, MPFR_RNDN);
        mpfr_neg(tmp.v, tmp.v, MPFR_RNDN);
        mpfr_exp(tmp.v, tmp.v, MPFR_RNDN);
        mpfr_mul(term.v, term.v, tmp.v, MPFR_RNDN);
        if (n % 2 == 0) {
            mpfr_sub(sum.v, sum.v, term.v, MPFR_RNDN);
        } else {
            mpfr_add(sum.v, sum.v, term.v, MPFR_RNDN);
        }
    }
    mpfr_div(sum.v, sum.v, pi.v, MPFR_RNDN);
    const double value = mpfr_get_d(sum.v, MPFR_RNDN);
    return std::max(0.0, value);
}

double stable_contour_angle(double gamma) {
    check_gamma(gamma);
    return -std::min(std::numbers::pi / 2.0, (std::numbers::pi / 4.0) * (1.0 / gamma - 1.0));
}

double stable_density_quadrature(double t, double gamma, double abs_tol) {
    check_gamma(gamma);
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("stable_density_quadrature: t must be positive");
    if (!(abs_tol > 0.0)) throw std::invalid_argument("stable_density_quadrature: abs_tol must be positive");
    using namespace std::complex_literals;
    const double a = std::tgamma(1.0 - gamma);
    const double phi = stable_contour_angle(gamma);
    const std::complex<double> ray = std::exp(1.0i * phi);
    const std::complex<double> coeff = a * std::exp(1.0i * (gamma * phi - std::numbers::pi * gamma / 2.0));
    auto integrand = [&](double r) {
        const std::complex<double> e = -1.0i * t * r * ray - coeff * std::pow(r, gamma);
        if (e.real() < -745.0) return 0.0;
        return (ray * std::exp(e)).real();
    };
    boost::math::quadrature::exp_sinh<double> rule;
    double err = 0.0;
    double l1 = 0.0;
    const double value = rule.integrate(integrand, 1e-14, &err, &l1) / std::numbers::pi;
    err /= std::numbers::pi;
    if (!std::isfinite(value) || err > abs_tol) {
        throw NumericalError("stable_density_quadrature: error estimate " + std::to_string(err) + " at t=" +
                             std::to_string(t));
    }
    return std::max(0.0, value);
}

std::complex<double> stable_laplace(std::complex<double> s, double gamma) {
    check_gamma(gamma);
    return std::exp(-std::tgamma(1.0 - gamma) * std::pow(s, gamma));
}

double stable_cdf(double y, double gamma) {
    check_gamma(gamma);
    if (!(y > 0.0)) return 0.0;
    if (!std::isfinite(y)) return 1.0;
    using namespace std::complex_literals;
    // The density integral of stable_density_quadrature, integrated over
    // t in [0, y] under the r-integral:
    //   F(y) = (1/pi) Re int_0^inf exp(-c r^gamma) (1 - exp(-i y r w)) / (i r) dr.
    const double a = std::tgamma(1.0 - gamma);
    const double phi = stable_contour_angle(gamma);
    const std::complex<double> ray = std::exp(1.0i * phi);
    const std::complex<double> coeff = a * std::exp(1.0i * (gamma * phi - std::numbers::pi * gamma / 2.0));
    auto integrand = [&](double r) {
        const std::complex<double> z = -1.0i * y * r * ray;
        // (1 - e^z) / (i r) -> y w as r -> 0
        const std::complex<double> kernel = std::abs(z) < 1e-8 ? y * ray * (1.0 + 0.5 * z) : (1.0 - std::exp(z)) / (1.0i * r);
        const std::complex<double> e = -coeff * std::pow(r, gamma);
        if (e.real() < -745.0) return 0.0;
        return (std::exp(e) * kernel).real();
    };
    boost::math::quadrature::exp_sinh<double> rule;
    double err = 0.0;
    double l1 = 0.0;
    const double value = rule.integrate(integrand, 1e-14, &err, &l1) / std::numbers::pi;
    if (!std::isfinite(value) || err / std::numbers::pi > 1e-10) {
        throw NumericalError("stable_cdf: error estimate " + std::to_string(err) + " at y=" + std::to_string(y));
    }
    return std::clamp(value, 0.0, 1.0);
}

double stable_normalization(double gamma) {
    check_gamma(gamma);
    using boost::math::quadrature::gauss_kronrod;
    auto density = [gamma](double t) { return stable_density_quadrature(t, gamma, 1e-9); };
    const double head = gauss_kronrod<double, 31>::integrate(density, 0.0, 1.0, 8, 1e-10);
    // Tail on u = t^{-gamma} in (0, 1]: the t^{-gamma-1} decay turns into a
    // bounded integrand.
    auto tail_integrand = [&](double u) {
        const double t = std::pow(u, -1.0 / gamma);
        return density(t) * t / (gamma * u);
    };
    const double tail = gauss_kronrod<double, 31>::integrate(tail_integrand, 0.0, 1.0, 8, 1e-10);
    const double value = head + tail;
    if (!std::isfinite(value)) throw NumericalError("stable_normalization: non-finite result");
    return value;
}

}  // namespace sojourn
