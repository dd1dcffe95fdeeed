#pragma once

#include "sojourn/analytic.hpp"
#include "sojourn/estimate.hpp"
#include "sojourn/laplace.hpp"
#include "sojourn/model.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sojourn {

struct EnsembleOptions {
    unsigned threads = 0;  // 0 = hardware concurrency
    int max_level = NormChainGenerator::default_max_level;
};

/// samples[j][i] = level-0 occupation of path i at times[j]. Paths are
/// index-seeded, so the result does not depend on the thread count.
std::vector<std::vector<double>> sojourn_samples(const ModelParams& params, std::span<const double> times,
                                                 std::size_t n_paths, std::uint64_t seed,
                                                 const EnsembleOptions& options = {});

/// Mean of theta(t)^beta.
Estimate estimate_moment(const ModelParams& params, double t, double beta, std::size_t n_paths,
                         std::uint64_t seed, const EnsembleOptions& options = {});

/// Large-t exponent of <theta^beta> claimed for alpha > 1: gamma * beta below
/// beta = alpha / (alpha - 1), beta - 1 / (alpha - 1) from there on.
double predicted_moment_exponent(const ModelParams& params, double beta);

struct MomentScaling {
    double beta = 0.0;
    double predicted_slope = 0.0;
    PowerLawFit fit;
    std::vector<double> times;
    std::vector<Estimate> moments;
    bool poor_fit = false;  // r_squared < 0.98
};

/// One log-log fit of <theta^beta>(t) per beta over t_grid, all moments
/// taken from the same ensemble. Requires alpha > 1.
std::vector<MomentScaling> moment_scaling_report(const ModelParams& params, std::span<const double> betas,
                                                 std::span<const double> t_grid, std::size_t n_paths,
                                                 std::uint64_t seed, const EnsembleOptions& options = {});

struct VolterraPoint {
    double t = 0.0;
    double inflow = 0.0;
    double convolution = 0.0;
    double density = 0.0;
    double residual = 0.0;
};

struct VolterraReport {
    double max_abs_residual = 0.0;
    std::vector<VolterraPoint> points;
};

/// r(t) = v(t) - (v * f)(t) - f(t) with v from the series and f inverted;
/// the convolution is adaptive Gauss-Kronrod quadrature.
VolterraReport volterra_residual(const ModelParams& params, std::span<const double> t_grid,
                                 const InversionMethod& method = InversionMethod::talbot(),
                                 const SeriesControl& ctrl = {});

struct OdePoint {
    double t = 0.0;
    double p0 = 0.0;
};

/// Integrates the forward equation of the level chain from the point mass at
/// level 0 with an adaptive Dormand-Prince stepper (absolute and relative
/// tolerance `tol`). Throws NumericalError on step-size underflow.
std::vector<OdePoint> ode_survival_oracle(const NormChainGenerator& gen, std::span<const double> t_grid,
                                          double tol = 1e-10);

struct LimitLawReport {
    double b_fit = 0.0;
    double ks_distance = 0.0;
    double gamma = 0.0;
    std::size_t n = 0;
};

/// Fits the single constant B of the limit law
///   P(theta(t) <= x t^gamma) -> 1 - F_gamma((1 / (B_alpha B x))^{1/gamma})
/// to the rescaled occupation times of an ensemble by least squares on the
/// distribution function; reports the fitted B and the KS distance after
/// the fit. Requires alpha > 1.
LimitLawReport limit_law_check(const ModelParams& params, double t, std::size_t n_paths, std::uint64_t seed,
                               const EnsembleOptions& options = {});

/// 1 - F_gamma((1 / (B_alpha b x))^{1/gamma}).
double limit_law_cdf(double x, double b, const ModelParams& params);

struct TailReport {
    PowerLawFit fit;
    double predicted_slope = 0.0;
    std::size_t n = 0;
    std::size_t returned = 0;
    std::vector<double> times;
    std::vector<double> survival;
};

/// Empirical survival of the first return time on a log grid over
/// [t_lo, t_hi] and its power-law fit. For alpha < 1 the survival is taken
/// conditional on returning before the horizon. Predicted slopes:
/// -(alpha - 1) / alpha for alpha > 1, -(1 / alpha - 1) for alpha < 1, 0 at
/// alpha = 1. Throws NumericalError when a grid point has no tail samples.
TailReport first_return_tail(const ModelParams& params, double horizon, std::size_t n_paths, std::uint64_t seed,
                             double t_lo, double t_hi, std::size_t points = 10,
                             const EnsembleOptions& options = {});

/// Fraction of paths whose first excursion is still running at the horizon.
Estimate never_returned_fraction(const ModelParams& params, double horizon, std::size_t n_paths,
                                 std::uint64_t seed, const EnsembleOptions& options = {});

/// P(level(t) = 0) at each of the ascending times.
std::vector<Estimate> empirical_survival(const ModelParams& params, std::span<const double> times,
                                         std::size_t n_paths, std::uint64_t seed,
                                         const EnsembleOptions& options = {});

struct SojournKs {
    double ks_distance = 0.0;
    double critical = 0.0;
    std::size_t n = 0;
};

/// KS distance between simulated theta(t) and the sojourn-time distribution
/// function, with the atom at theta = t handled through left limits.
SojournKs sojourn_cdf_ks(const ModelParams& params, double t, std::size_t n_paths, std::uint64_t seed,
                         const EnsembleOptions& options = {},
                         const InversionMethod& method = InversionMethod::talbot());

}  // namespace sojourn
