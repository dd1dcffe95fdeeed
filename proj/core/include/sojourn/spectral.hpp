#pragma once

#include "sojourn/estimate.hpp"
#include "sojourn/experiments.hpp"
#include "sojourn/model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sojourn {

/// Frequency process with variance law <nu^2(theta)> = D theta^{2h}, run on
/// the occupation-time clock of the walk.
class SpectralParams {
public:
    /// Throws std::invalid_argument unless 0 < h < 1 and D > 0.
    SpectralParams(double h, double d, const ModelParams& model);

    double h() const noexcept { return h_; }
    double d() const noexcept { return d_; }
    const ModelParams& model() const noexcept { return model_; }

    /// Empty when 2h < alpha / (alpha - 1) or alpha <= 1; otherwise a
    /// warning that the small-moment scaling regime does not apply.
    std::string regime_warning() const;

private:
    double h_;
    double d_;
    ModelParams model_;
};

struct WidthRow {
    double t = 0.0;
    double t_a = 0.0;
    double sigma = 0.0;
    double std_error = 0.0;
    std::int64_t n = 0;
};

/// Rows sorted by (t_a, t).
using WidthTable = std::vector<WidthRow>;

/// sigma(t) = sqrt(D <theta(t)^{2h}>), standard error by the delta method.
WidthTable hole_width(const SpectralParams& sp, std::span<const double> t_grid, std::size_t n_paths,
                      std::uint64_t seed, const EnsembleOptions& options = {});

/// sigma(t, t_a) from the occupation increments theta(t_a + t) - theta(t_a).
WidthTable ageing_width(const SpectralParams& sp, double t, std::span<const double> t_a_grid, std::size_t n_paths,
                        std::uint64_t seed, const EnsembleOptions& options = {});

/// Log-log fit of sigma against t (t_a = 0 rows) or against t_a.
PowerLawFit width_slope(const WidthTable& table, bool against_age = false);

struct ExponentReport {
    double alpha_inferred = 0.0;
};

/// alpha = b / c from observed width and ageing exponents.
ExponentReport exponent_report(double b_obs, double c_obs);

/// Width exponent (alpha - 1) h / alpha.
double b_pred(double alpha, double h);
/// Ageing exponent h / alpha.
double c_pred(double alpha, double h);

}  // namespace sojourn
