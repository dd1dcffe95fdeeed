#pragma once

#include "sojourn/laplace.hpp"
#include "sojourn/model.hpp"
#include "sojourn/series.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <type_traits>
#include <vector>

namespace sojourn {

/// The level decomposition of the survival probability,
///
///   J(t) = sum_n w_n exp(-lambda_n t),  w_n = (1 - 1/p) p^{-n},  lambda_n = p^{-alpha n},
///
/// together with every quantity that is a linear functional of it: the
/// transform J^(s), the inflow rate v(t) = J'(t) + B J(t) and its transform,
/// and the mean sojourn time int_0^t J. Truncation uses the geometric bound
/// sum_{m >= n} w_m = p^{-n} on the remaining mass.
class SurvivalSeries {
public:
    explicit SurvivalSeries(const ModelParams& params, const SeriesControl& ctrl = {});

    const ModelParams& params() const noexcept { return params_; }
    const SeriesControl& control() const noexcept { return ctrl_; }
    double b_alpha() const noexcept { return b_alpha_; }
    std::size_t terms() const noexcept { return weight_.size(); }
    double weight(std::size_t n) const { return weight_.at(n); }
    double decay(std::size_t n) const { return decay_.at(n); }

    double survival(double t) const;
    double inflow(double t) const;
    double mean_sojourn(double t) const;

    /// J^(s) for real s > 0 or complex s off the segment [-1, 0].
    template <class S>
    S transform(S s) const {
        return sum_resolvent(s, [](double, double w) { return w; }, 1.0);
    }

    /// v^(s) = (B + s) J^(s) - 1, summed termwise so that no cancellation
    /// between (B + s) J^ and 1 occurs. Since sum_n w_n (B - lambda_n) = 0,
    /// large |s| uses the equivalent (1/s) sum_n w_n lambda_n (lambda_n - B) / (s + lambda_n),
    /// whose leading 1/s terms are already cancelled.
    template <class S>
    S inflow_transform(S s) const {
        const double b = b_alpha_;
        const double bound = std::max(1.0, b);
        if (std::abs(s) > 1.0) {
            return sum_resolvent(s, [b](double lambda, double w) { return w * lambda * (lambda - b); }, bound) / s;
        }
        return sum_resolvent(s, [b](double lambda, double w) { return w * (b - lambda); }, bound);
    }

    /// f^(s) = v^ / (1 + v^), the first-return transform.
    template <class S>
    S first_return_transform(S s) const {
        const S v = inflow_transform(s);
        return v / (1.0 + v);
    }

    /// h^(s) = f^(s) / g^(s) with g^(s) = B / (s + B), the transform of one
    /// excursion outside the unit ball.
    template <class S>
    S excursion_transform(S s) const {
        const S v = inflow_transform(s);
        return v / (1.0 + v) * (s + b_alpha_) / b_alpha_;
    }

private:
    static double distance_to_poles(double s) { return s; }
    static double distance_to_poles(std::complex<double> s) {
        if (s.real() >= 0.0) return std::abs(s);
        if (s.real() < -1.0) return std::abs(s + 1.0);
        return std::abs(s.imag());
    }

    /// sum_n coeff(lambda_n, w_n) / (s + lambda_n) with remainder bound
    /// coeff_bound * p^{-n} / dist(s, poles).
    template <class S, class Coeff>
    S sum_resolvent(S s, Coeff coeff, double coeff_bound) const {
        const double dist = distance_to_poles(s);
        if (!(dist > 0.0)) throw NumericalError("series evaluated on a pole of the transform");
        S sum{};
        for (std::size_t n = 0; n < weight_.size(); ++n) {
            sum += coeff(decay_[n], weight_[n]) / (s + decay_[n]);
            const double remaining = coeff_bound * tail_mass_[n + 1] / dist;
            if (ctrl_.converged(remaining, std::abs(sum))) return sum;
        }
        throw NumericalError("transform series did not converge within max_terms");
    }

    ModelParams params_;
    SeriesControl ctrl_;
    double b_alpha_;
    std::vector<double> weight_;
    std::vector<double> decay_;
    std::vector<double> tail_mass_;  // tail_mass_[n] = p^{-n}
};

double survival_j(double t, const ModelParams& params, const SeriesControl& ctrl = {});
double j_hat(double s, const ModelParams& params, const SeriesControl& ctrl = {});
double f_hat(double s, const ModelParams& params, const SeriesControl& ctrl = {});
double h_n_hat(double s, int n, const ModelParams& params, const SeriesControl& ctrl = {});
double v_rate(double t, const ModelParams& params, const SeriesControl& ctrl = {});
double mean_sojourn(double t, const ModelParams& params, const SeriesControl& ctrl = {});

/// Erlang(n, B) distribution function: total time of n unit-ball visits.
double g_n_cdf(double t, int n, const ModelParams& params);

/// G_n(theta) - G_{n+1}(theta) = Poisson(B theta) mass at n.
double poisson_weight(int n, double theta, const ModelParams& params);

/// Number of outer terms kept for the sojourn series: a Chernoff-style cut
/// B theta + 10 sqrt(B theta + 1) + 20.
int poisson_cutoff(double b_theta);

struct SojournCdfReport {
    double value = 0.0;
    double est_error = 0.0;
};

/// Distribution function of the unit-ball sojourn time theta(t),
///   Phi(theta, t) = 1 - sum_n H_n(t - theta) [G_n(theta) - G_{n+1}(theta)],
/// with H_n inverted from h^(s)^n / s. Phi(t, t) = 1. Throws NumericalError
/// when the inversion's successive-order check fails.
double sojourn_cdf(double theta, double t, const ModelParams& params,
                   const InversionMethod& method = InversionMethod::talbot(),
                   const SeriesControl& ctrl = {});
SojournCdfReport sojourn_cdf_report(double theta, double t, const SurvivalSeries& series,
                                    const InversionMethod& method = InversionMethod::talbot());

/// Distribution function of the time spent outside the unit ball,
///   Phi_out(theta, t) = sum_n H_n(theta) [G_n(t - theta) - G_{n+1}(t - theta)].
double sojourn_cdf_outside(double theta, double t, const ModelParams& params,
                           const InversionMethod& method = InversionMethod::talbot(),
                           const SeriesControl& ctrl = {});

}  // namespace sojourn
