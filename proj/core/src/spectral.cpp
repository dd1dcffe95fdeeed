#include "sojourn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sojourn {

SpectralParams::SpectralParams(double h, double d, const ModelParams& model) : h_(h), d_(d), model_(model) {
    if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("SpectralParams: h must lie in (0, 1)");
    if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("SpectralParams: D must be positive");
}

std::string SpectralParams::regime_warning() const {
    const double alpha = model_.alpha();
    if (alpha <= 1.0 || 2.0 * h_ < alpha / (alpha - 1.0)) return {};
    return "2h >= alpha / (alpha - 1): the width is outside the small-moment scaling regime";
}

namespace {

WidthRow width_row(const SpectralParams& sp, double t, double t_a, std::vector<double>& occupation) {
    const double beta = 2.0 * sp.h();
    for (double& x : occupation) x = std::pow(x, beta);
    const Estimate m = Estimate::from_samples(occupation);
    WidthRow row{t, t_a, std::sqrt(sp.d() * m.value), 0.0, m.n};
    // d sqrt(D m) / dm = sqrt(D) / (2 sqrt(m))
    row.std_error = m.value > 0.0 ? std::sqrt(sp.d()) * m.std_error / (2.0 * std::sqrt(m.value)) : 0.0;
    return row;
}

void require_width_paths(std::size_t n_paths) {
    if (n_paths < 1000) throw std::invalid_argument("spectral widths need at least 1000 paths");
}

}  // namespace

WidthTable hole_width(const SpectralParams& sp, std::span<const double> t_grid, std::size_t n_paths,
                      std::uint64_t seed, const EnsembleOptions& options) {
    require_width_paths(n_paths);
    std::vector<double> times(t_grid.begin(), t_grid.end());
    std::sort(times.begin(), times.end());
    if (times.empty() || !(times.front() > 0.0)) throw std::invalid_argument("hole_width: times must be positive");
    auto samples = sojourn_samples(sp.model(), times, n_paths, seed, options);
    WidthTable table;
    for (std::size_t j = 0; j < times.size(); ++j) table.push_back(width_row(sp, times[j], 0.0, samples[j]));
    return table;
}

WidthTable ageing_width(const SpectralParams& sp, double t, std::span<const double> t_a_grid, std::size_t n_paths,
                        std::uint64_t seed, const EnsembleOptions& options) {
    require_width_paths(n_paths);
    if (!(t > 0.0)) throw std::invalid_argument("ageing_width: t must be positive");
    std::vector<double> ages(t_a_grid.begin(), t_a_grid.end());
    std::sort(ages.begin(), ages.end());
    if (ages.empty() || !(ages.front() >= 0.0)) throw std::invalid_argument("ageing_width: ages must be nonnegative");
    // checkpoints t_a and t_a + t for every age, merged in ascending order
    std::vector<double> times;
    for (double a : ages) {
        times.push_back(a);
        times.push_back(a + t);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    auto samples = sojourn_samples(sp.model(), times, n_paths, seed, options);
    auto column = [&](double at) {
        return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), at) - times.begin());
    };
    WidthTable table;
    for (double a : ages) {
        const auto& start = samples[column(a)];
        const auto& end = samples[column(a + t)];
        std::vector<double> increment(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) increment[i] = std::max(0.0, end[i] - start[i]);
        table.push_back(width_row(sp, t, a, increment));
    }
    return table;
}

PowerLawFit width_slope(const WidthTable& table, bool against_age) {
    std::vector<double> x, y;
    for (const auto& row : table) {
        if (against_age ? row.t_a > 0.0 : row.t_a == 0.0) {
            x.push_back(against_age ? row.t_a : row.t);
            y.push_back(row.sigma);
        }
    }
    return fit_power_law(x, y);
}

ExponentReport exponent_report(double b_obs, double c_obs) {
    if (!(b_obs > 0.0) || !(c_obs > 0.0)) throw std::invalid_argument("exponent_report: exponents must be positive");
    return {b_obs / c_obs};
}

double b_pred(double alpha, double h) {
    if (!(alpha > 0.0)) throw std::invalid_argument("b_pred: alpha must be positive");
    return (alpha - 1.0) * h / alpha;
}

double c_pred(double alpha, double h) {
    if (!(alpha > 0.0)) throw std::invalid_argument("c_pred: alpha must be positive");
    return h / alpha;
}

}  // namespace sojourn
