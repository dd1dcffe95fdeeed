#include "sojourn/experiments.hpp"

#include "sojourn/simulate.hpp"
#include "sojourn/stable.hpp"
#include "sojourn/transforms.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sojourn {

namespace {

void require_paths(std::size_t n_paths, std::size_t minimum, const char* what) {
    if (n_paths < minimum) {
        throw std::invalid_argument(std::string(what) + ": at least " + std::to_string(minimum) + " paths required");
    }
}

void require_times(std::span<const double> times, const char* what) {
    if (times.empty() || !std::is_sorted(times.begin(), times.end()) || !(times.front() >= 0.0) ||
        !std::isfinite(times.back())) {
        throw std::invalid_argument(std::string(what) + ": times must be finite, nonnegative and ascending");
    }
}

}  // namespace

std::vector<std::vector<double>> sojourn_samples(const ModelParams& params, std::span<const double> times,
                                                 std::size_t n_paths, std::uint64_t seed,
                                                 const EnsembleOptions& options) {
    require_times(times, "sojourn_samples");
    const NormChainGenerator gen(params, options.max_level);
    std::vector<std::vector<double>> per_path(n_paths);
    parallel_for(n_paths, options.threads, [&](std::size_t i) { per_path[i] = sojourn_profile(gen, times, seed, i); });
    std::vector<std::vector<double>> out(times.size(), std::vector<double>(n_paths));
    for (std::size_t i = 0; i < n_paths; ++i) {
        for (std::size_t j = 0; j < times.size(); ++j) out[j][i] = per_path[i][j];
    }
    return out;
}

Estimate estimate_moment(const ModelParams& params, double t, double beta, std::size_t n_paths, std::uint64_t seed,
                         const EnsembleOptions& options) {
    if (!(t > 0.0)) throw std::invalid_argument("estimate_moment: t must be positive");
    if (!(beta > 0.0)) throw std::invalid_argument("estimate_moment: beta must be positive");
    require_paths(n_paths, 100, "estimate_moment");
    const double times[] = {t};
    auto samples = std::move(sojourn_samples(params, times, n_paths, seed, options).front());
    for (double& x : samples) x = std::pow(x, beta);
    return Estimate::from_samples(samples);
}

double predicted_moment_exponent(const ModelParams& params, double beta) {
    const double alpha = params.alpha();
    if (!(alpha > 1.0)) throw std::invalid_argument("moment exponents are defined for alpha > 1 only");
    const double gamma = (alpha - 1.0) / alpha;
    return beta < alpha / (alpha - 1.0) ? gamma * beta : beta - 1.0 / (alpha - 1.0);
}

std::vector<MomentScaling> moment_scaling_report(const ModelParams& params, std::span<const double> betas,
                                                 std::span<const double> t_grid, std::size_t n_paths,
                                                 std::uint64_t seed, const EnsembleOptions& options) {
    if (!(params.alpha() > 1.0)) throw std::invalid_argument("moment_scaling_report: alpha must exceed 1");
    require_times(t_grid, "moment_scaling_report");
    require_paths(n_paths, 100, "moment_scaling_report");
    const auto samples = sojourn_samples(params, t_grid, n_paths, seed, options);
    std::vector<MomentScaling> out;
    for (double beta : betas) {
        if (!(beta > 0.0)) throw std::invalid_argument("moment_scaling_report: beta must be positive");
        MomentScaling row;
        row.beta = beta;
        row.predicted_slope = predicted_moment_exponent(params, beta);
        row.times.assign(t_grid.begin(), t_grid.end());
        std::vector<double> values;
        std::vector<double> powered(n_paths);
        for (const auto& at_t : samples) {
            std::transform(at_t.begin(), at_t.end(), powered.begin(), [beta](double x) { return std::pow(x, beta); });
            row.moments.push_back(Estimate::from_samples(powered));
            values.push_back(row.moments.back().value);
        }
        row.fit = fit_power_law(t_grid, values);
        row.poor_fit = row.fit.r_squared < 0.98;
        out.push_back(std::move(row));
    }
    return out;
}

VolterraReport volterra_residual(const ModelParams& params, std::span<const double> t_grid,
                                 const InversionMethod& method, const SeriesControl& ctrl) {
    using boost::math::quadrature::gauss_kronrod;
    const SurvivalSeries series(params, ctrl);
    auto density = [&](double t) { return t > 0.0 ? first_return_density(t, series, method).value : 0.0; };
    VolterraReport report;
    for (double t : t_grid) {
        if (!(t > 0.0)) throw std::invalid_argument("volterra_residual: grid points must be positive");
        VolterraPoint pt;
        pt.t = t;
        pt.inflow = series.inflow(t);
        pt.density = density(t);
        double err = 0.0;
        pt.convolution = gauss_kronrod<double, 31>::integrate(
            [&](double tau) { return series.inflow(t - tau) * density(tau); }, 0.0, t, 10, 1e-11, &err);
        if (err > 1e-6) throw NumericalError("volterra_residual: convolution quadrature did not converge");
        pt.residual = pt.inflow - pt.convolution - pt.density;
        report.max_abs_residual = std::max(report.max_abs_residual, std::abs(pt.residual));
        report.points.push_back(pt);
    }
    return report;
}

LimitLawReport limit_law_check(const ModelParams& params, double t, std::size_t n_paths, std::uint64_t seed,
                               const EnsembleOptions& options) {
    const auto constants = derive_constants(params);
    if (!constants.tail_gamma) throw std::invalid_argument("limit_law_check: alpha must exceed 1");
    if (!(t > 0.0)) throw std::invalid_argument("limit_law_check: t must be positive");
    require_paths(n_paths, 100, "limit_law_check");
    const double gamma = *constants.tail_gamma;
    const double times[] = {t};
    auto x = std::move(sojourn_samples(params, times, n_paths, seed, options).front());
    const double scale = std::pow(t, gamma);
    for (double& v : x) v /= scale;
    std::sort(x.begin(), x.end());

    // Fit on 199 empirical quantiles.
    std::vector<double> qx, qp;
    for (int k = 1; k < 200; ++k) {
        const double prob = k / 200.0;
        const auto idx = static_cast<std::size_t>(std::floor(prob * static_cast<double>(x.size())));
        const double value = x[std::min(idx, x.size() - 1)];
        if (value > 0.0) {
            qx.push_back(value);
            qp.push_back(prob);
        }
    }
    if (qx.size() < 10) throw NumericalError("limit_law_check: too few positive occupation times");
    auto loss = [&](double log_b) {
        const double b = std::exp(log_b);
        double sum = 0.0;
        for (std::size_t i = 0; i < qx.size(); ++i) {
            const double d = limit_law_cdf(qx[i], b, params) - qp[i];
            sum += d * d;
        }
        return sum;
    };
    const auto [log_b, value] = boost::math::tools::brent_find_minima(loss, std::log(1e-3), std::log(1e3), 40);
    (void)value;
    const double b = std::exp(log_b);
    if (std::abs(log_b - std::log(1e-3)) < 1e-3 || std::abs(log_b - std::log(1e3)) < 1e-3) {
        throw NumericalError("limit_law_check: fitted B hit the search bracket");
    }

    std::vector<double> model(x.size());
    parallel_for(x.size(), options.threads, [&](std::size_t i) { model[i] = limit_law_cdf(x[i], b, params); });
    double d = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size();) {
        std::size_t j = i;
        while (j < x.size() && x[j] == x[i]) ++j;
        d = std::max({d, std::abs(static_cast<double>(j) / n - model[i]), std::abs(static_cast<double>(i) / n - model[i])});
        i = j;
    }
    return {b, d, gamma, x.size()};
}

double limit_law_cdf(double x, double b, const ModelParams& params) {
    const auto constants = derive_constants(params);
    if (!constants.tail_gamma) throw std::invalid_argument("limit_law_cdf: alpha must exceed 1");
    if (!(x > 0.0)) return 0.0;
    const double gamma = *constants.tail_gamma;
    const double y = std::pow(1.0 / (constants.b_alpha * b * x), 1.0 / gamma);
    return 1.0 - stable_cdf(y, gamma);
}

namespace {

double predicted_tail_slope(const ModelParams& params) {
    const double alpha = params.alpha();
    if (alpha > 1.0) return -(alpha - 1.0) / alpha;
    if (alpha < 1.0) return -(1.0 / alpha - 1.0);
    return 0.0;
}

std::vector<FirstReturn> first_returns(const ModelParams& params, double horizon, std::size_t n_paths,
                                       std::uint64_t seed, const EnsembleOptions& options) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be positive");
    const NormChainGenerator gen(params, options.max_level);
    std::vector<FirstReturn> out(n_paths);
    parallel_for(n_paths, options.threads, [&](std::size_t i) { out[i] = first_return_time(gen, horizon, seed, i); });
    return out;
}

}  // namespace

TailReport first_return_tail(const ModelParams& params, double horizon, std::size_t n_paths, std::uint64_t seed,
                             double t_lo, double t_hi, std::size_t points, const EnsembleOptions& options) {
    require_paths(n_paths, 10000, "first_return_tail");
    if (!(t_lo > 0.0) || !(t_hi > t_lo) || t_hi > horizon) {
        throw std::invalid_argument("first_return_tail: need 0 < t_lo < t_hi <= horizon");
    }
    const auto runs = first_returns(params, horizon, n_paths, seed, options);
    std::vector<double> returned;
    for (const auto& r : runs) {
        if (r.time) returned.push_back(*r.time);
    }
    std::sort(returned.begin(), returned.end());
    TailReport report;
    report.n = n_paths;
    report.returned = returned.size();
    report.predicted_slope = predicted_tail_slope(params);
    report.times = log_grid(t_lo, t_hi, points);
    const bool conditional = params.alpha() < 1.0;
    const double censored = static_cast<double>(n_paths - returned.size());
    for (double t : report.times) {
        const auto later = static_cast<double>(returned.end() - std::upper_bound(returned.begin(), returned.end(), t));
        const double tail = conditional ? later / static_cast<double>(returned.size())
                                        : (later + censored) / static_cast<double>(n_paths);
        if (!(tail > 0.0)) throw NumericalError("first_return_tail: no samples beyond t=" + std::to_string(t));
        report.survival.push_back(tail);
    }
    report.fit = fit_power_law(report.times, report.survival);
    return report;
}

Estimate never_returned_fraction(const ModelParams& params, double horizon, std::size_t n_paths, std::uint64_t seed,
                                 const EnsembleOptions& options) {
    require_paths(n_paths, 100, "never_returned_fraction");
    const auto runs = first_returns(params, horizon, n_paths, seed, options);
    std::vector<double> flags(n_paths);
    std::transform(runs.begin(), runs.end(), flags.begin(), [](const FirstReturn& r) { return r.time ? 0.0 : 1.0; });
    return Estimate::from_samples(flags);
}

std::vector<Estimate> empirical_survival(const ModelParams& params, std::span<const double> times,
                                         std::size_t n_paths, std::uint64_t seed, const EnsembleOptions& options) {
    require_times(times, "empirical_survival");
    require_paths(n_paths, 100, "empirical_survival");
    const NormChainGenerator gen(params, options.max_level);
    std::vector<std::vector<double>> at_zero(times.size(), std::vector<double>(n_paths, 0.0));
    parallel_for(n_paths, options.threads, [&](std::size_t i) {
        std::size_t next = 0;
        PathRng rng(seed, i);
        walk_levels(gen, times.back(), rng, [&](int level, double start, double holding) {
            while (next < times.size() && times[next] < start + holding) {
                at_zero[next][i] = level == 0 ? 1.0 : 0.0;
                ++next;
            }
            return next < times.size();
        });
    });
    std::vector<Estimate> out;
    for (const auto& flags : at_zero) out.push_back(Estimate::from_samples(flags));
    return out;
}

SojournKs sojourn_cdf_ks(const ModelParams& params, double t, std::size_t n_paths, std::uint64_t seed,
                         const EnsembleOptions& options, const InversionMethod& method) {
    if (!(t > 0.0)) throw std::invalid_argument("sojourn_cdf_ks: t must be positive");
    require_paths(n_paths, 100, "sojourn_cdf_ks");
    const double times[] = {t};
    auto theta = std::move(sojourn_samples(params, times, n_paths, seed, options).front());
    std::sort(theta.begin(), theta.end());
    const SurvivalSeries series(params);
    const double atom = std::exp(-series.b_alpha() * t);  // never left the ball

    std::vector<double> model(theta.size());
    parallel_for(theta.size(), options.threads, [&](std::size_t i) {
        if (theta[i] >= t) {
            model[i] = 1.0;
            return;
        }
        const auto r = sojourn_cdf_report(theta[i], t, series, method);
        if (r.est_error > method.tolerance(r.value)) {
            throw NumericalError("sojourn_cdf_ks: inversion check failed at theta=" + std::to_string(theta[i]));
        }
        model[i] = std::clamp(r.value, 0.0, 1.0);
    });
    const double n = static_cast<double>(theta.size());
    double d = 0.0;
    for (std::size_t i = 0; i < theta.size();) {
        std::size_t j = i;
        while (j < theta.size() && theta[j] == theta[i]) ++j;
        const double left = theta[i] >= t ? 1.0 - atom : model[i];
        d = std::max({d, std::abs(static_cast<double>(j) / n - model[i]), std::abs(static_cast<double>(i) / n - left)});
        i = j;
    }
    return {d, ks_critical_1pct(theta.size()), theta.size()};
}

}  // namespace sojourn
