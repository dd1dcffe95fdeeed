#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace sojourn {

/// Monte Carlo mean with its standard error.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n = 0;

    /// Mean and sample standard deviation / sqrt(n). Two passes, compensated.
    static Estimate from_samples(std::span<const double> samples);

    /// Pooled estimate of the union of two disjoint samples.
    friend Estimate merge(const Estimate& a, const Estimate& b);

    /// |value - target| <= k * std_error.
    bool within(double target, double k = 3.0) const;
};

/// Least-squares line through (log x, log y).
struct PowerLawFit {
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    double x_lo = 0.0;
    double x_hi = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Throws std::invalid_argument with fewer than 5 points or nonpositive
/// data.
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

/// n points equally spaced in log between lo and hi, inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// Runs body(i) for i in [0, n) on `threads` workers (0 = hardware
/// concurrency). Work is handed out in index order; the first exception
/// thrown is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and
/// a distribution function. `left_limit(x)` returns F(x-) and defaults to
/// F itself; supply it when F has atoms.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf,
                   const std::function<double(double)>& left_limit = {});

/// Asymptotic one-sample KS critical value at level 1%.
double ks_critical_1pct(std::size_t n);

}  // namespace sojourn
