#include "sojourn/analytic.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sojourn {

SurvivalSeries::SurvivalSeries(const ModelParams& params, const SeriesControl& ctrl)
    : params_(params), ctrl_(ctrl), b_alpha_(derive_constants(params).b_alpha) {
    ctrl_.validate();
    const double lp = params.log_p();
    // Beyond ~700/log p the weights underflow; no tolerance can ask for more.
    const auto cap = static_cast<std::size_t>(std::min<double>(ctrl_.max_terms, std::ceil(700.0 / lp)));
    weight_.reserve(cap);
    decay_.reserve(cap);
    tail_mass_.reserve(cap + 1);
    const double shell = -std::expm1(-lp);  // 1 - 1/p
    for (std::size_t n = 0; n < cap; ++n) {
        const double nd = static_cast<double>(n);
        tail_mass_.push_back(std::exp(-nd * lp));
        weight_.push_back(shell * tail_mass_.back());
        decay_.push_back(std::exp(-params.alpha() * nd * lp));
    }
    tail_mass_.push_back(std::exp(-static_cast<double>(cap) * lp));
}

double SurvivalSeries::survival(double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("survival: t must be nonnegative");
    if (t == 0.0) return 1.0;
    double sum = 0.0;
    for (std::size_t n = 0; n < weight_.size(); ++n) {
        sum += weight_[n] * std::exp(-decay_[n] * t);
        if (ctrl_.converged(tail_mass_[n + 1], sum)) return std::clamp(sum, 0.0, 1.0);
    }
    throw NumericalError("survival series did not converge within max_terms");
}

double SurvivalSeries::inflow(double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("inflow: t must be nonnegative");
    if (t == 0.0) return 0.0;
    const double bound = std::max(1.0, b_alpha_);
    CompensatedSum<double> sum;
    for (std::size_t n = 0; n < weight_.size(); ++n) {
        sum += weight_[n] * (b_alpha_ - decay_[n]) * std::exp(-decay_[n] * t);
        if (ctrl_.converged(bound * tail_mass_[n + 1], sum.value())) return std::max(0.0, sum.value());
    }
    throw NumericalError("inflow series did not converge within max_terms");
}

double SurvivalSeries::mean_sojourn(double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("mean_sojourn: t must be nonnegative");
    if (t == 0.0) return 0.0;
    CompensatedSum<double> sum;
    for (std::size_t n = 0; n < weight_.size(); ++n) {
        const double lambda = decay_[n];
        // (1 - e^{-lambda t}) / lambda, with the lambda -> 0 limit t
        const double occupied = lambda > 0.0 ? -std::expm1(-lambda * t) / lambda : t;
        sum += weight_[n] * occupied;
        // each later term is at most w_m t
        if (lambda * t < 1.0 && ctrl_.converged(t * tail_mass_[n + 1], sum.value())) {
            return std::min(sum.value(), t);
        }
    }
    throw NumericalError("mean-sojourn series did not converge within max_terms");
}

double survival_j(double t, const ModelParams& params, const SeriesControl& ctrl) {
    return SurvivalSeries(params, ctrl).survival(t);
}

double j_hat(double s, const ModelParams& params, const SeriesControl& ctrl) {
    if (!(s > 0.0)) throw std::invalid_argument("j_hat: s must be positive");
    return SurvivalSeries(params, ctrl).transform(s);
}

namespace {

/// f^(0): 1 for recurrent walks, otherwise v^(0) / (1 + v^(0)) with the
/// geometric sum v^(0) = B (1 - 1/p) / (1 - p^{alpha-1}) - 1.
double first_return_at_zero(const ModelParams& params) {
    if (params.recurrent()) return 1.0;
    const double b = derive_constants(params).b_alpha;
    const double lp = params.log_p();
    const double v0 = b * -std::expm1(-lp) / -std::expm1((params.alpha() - 1.0) * lp) - 1.0;
    return v0 / (1.0 + v0);
}

}  // namespace

double f_hat(double s, const ModelParams& params, const SeriesControl& ctrl) {
    if (!(s >= 0.0)) throw std::invalid_argument("f_hat: s must be nonnegative");
    if (s == 0.0) return first_return_at_zero(params);
    return std::clamp(SurvivalSeries(params, ctrl).first_return_transform(s), 0.0, 1.0);
}

double h_n_hat(double s, int n, const ModelParams& params, const SeriesControl& ctrl) {
    if (!(s >= 0.0)) throw std::invalid_argument("h_n_hat: s must be nonnegative");
    if (n < 0) throw std::invalid_argument("h_n_hat: n must be nonnegative");
    if (n == 0) return 1.0;
    // g^(0) = 1, so h^(0) = f^(0)
    const double h1 = s == 0.0 ? first_return_at_zero(params)
                               : SurvivalSeries(params, ctrl).excursion_transform(s);
    return std::pow(std::clamp(h1, 0.0, 1.0), n);
}

double v_rate(double t, const ModelParams& params, const SeriesControl& ctrl) {
    return SurvivalSeries(params, ctrl).inflow(t);
}

double mean_sojourn(double t, const ModelParams& params, const SeriesControl& ctrl) {
    return SurvivalSeries(params, ctrl).mean_sojourn(t);
}

double g_n_cdf(double t, int n, const ModelParams& params) {
    if (!(t >= 0.0)) throw std::invalid_argument("g_n_cdf: t must be nonnegative");
    if (n < 1) throw std::invalid_argument("g_n_cdf: n must be at least 1");
    if (t == 0.0) return 0.0;
    return boost::math::gamma_p(static_cast<double>(n), derive_constants(params).b_alpha * t);
}

double poisson_weight(int n, double theta, const ModelParams& params) {
    if (!(theta >= 0.0)) throw std::invalid_argument("poisson_weight: theta must be nonnegative");
    if (n < 0) throw std::invalid_argument("poisson_weight: n must be nonnegative");
    const double mean = derive_constants(params).b_alpha * theta;
    if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

int poisson_cutoff(double b_theta) {
    return static_cast<int>(std::ceil(b_theta + 10.0 * std::sqrt(b_theta + 1.0) + 20.0));
}

namespace {

/// sum_{n >= 1} P(n; mean) H_n(x), with H_n inverted from h^(s)^n / s on a
/// single node set. The n = 0 term is left to the caller.
double excursion_mixture(double x, double mean, const SurvivalSeries& series, InversionMethod::Kind kind,
                         int order) {
    const int cutoff = poisson_cutoff(mean);
    const double log_mean = mean > 0.0 ? std::log(mean) : -std::numeric_limits<double>::infinity();
    CompensatedSum<double> total;
    for (const auto& node : inversion_nodes(kind, x, order)) {
        const std::complex<double> h = series.excursion_transform(node.s);
        std::complex<double> power = 1.0;
        std::complex<double> mixed = 0.0;
        for (int n = 1; n <= cutoff; ++n) {
            power *= h;
            const double log_w = n * log_mean - mean - std::lgamma(n + 1.0);
            if (log_w < -745.0) continue;
            mixed += std::exp(log_w) * power;
        }
        total += (node.weight * mixed / node.s).real();
    }
    return total.value();
}

void check_sojourn_args(double theta, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("sojourn cdf: t must be finite and nonnegative");
    if (!(theta >= 0.0) || theta > t) throw std::invalid_argument("sojourn cdf: theta must lie in [0, t]");
}

}  // namespace

SojournCdfReport sojourn_cdf_report(double theta, double t, const SurvivalSeries& series,
                                    const InversionMethod& method) {
    method.validate();
    check_sojourn_args(theta, t);
    if (theta == t) return {1.0, 0.0};
    const double x = t - theta;
    const double mean = series.b_alpha() * theta;
    const double stay = std::exp(-mean);  // n = 0: never left before accumulating theta
    auto evaluate = [&](int order) { return 1.0 - stay - excursion_mixture(x, mean, series, method.kind, order); };
    const double value = evaluate(method.order);
    return {value, std::abs(value - evaluate(method.order - 2))};
}

double sojourn_cdf(double theta, double t, const ModelParams& params, const InversionMethod& method,
                   const SeriesControl& ctrl) {
    const SurvivalSeries series(params, ctrl);
    const auto report = sojourn_cdf_report(theta, t, series, method);
    if (report.est_error > method.tolerance(report.value)) {
        throw NumericalError("sojourn cdf: inversion orders disagree by " + std::to_string(report.est_error));
    }
    return std::clamp(report.value, 0.0, 1.0);
}

double sojourn_cdf_outside(double theta, double t, const ModelParams& params, const InversionMethod& method,
                           const SeriesControl& ctrl) {
    method.validate();
    check_sojourn_args(theta, t);
    const SurvivalSeries series(params, ctrl);
    const double mean = series.b_alpha() * (t - theta);
    const double stay = std::exp(-mean);  // n = 0 with H_0 = 1 on [0, inf)
    if (theta == 0.0) return stay;
    auto evaluate = [&](int order) { return stay + excursion_mixture(theta, mean, series, method.kind, order); };
    const double value = evaluate(method.order);
    const double err = std::abs(value - evaluate(method.order - 2));
    if (err > method.tolerance(value)) {
        throw NumericalError("sojourn cdf (outside): inversion orders disagree by " + std::to_string(err));
    }
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace sojourn
