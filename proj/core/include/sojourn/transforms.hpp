#pragma once

#include "sojourn/analytic.hpp"
#include "sojourn/laplace.hpp"
#include "sojourn/model.hpp"

#include <cstdint>

namespace sojourn {

/// First-return density f(t), inverted from f^(s) = v^ / (1 + v^).
///
/// A slightly negative result within 2 * est_error is clipped to 0 and the
/// report's `clipped` flag set; larger negative values are a NumericalError.
InversionReport first_return_density(double t, const ModelParams& params,
                                     const InversionMethod& method = InversionMethod::talbot(),
                                     const SeriesControl& ctrl = {});
InversionReport first_return_density(double t, const SurvivalSeries& series,
                                     const InversionMethod& method = InversionMethod::talbot());

/// P(tau <= t) = int_0^t f, inverted from f^(s) / s. Tends to 1 for alpha >= 1
/// and to C_alpha otherwise.
InversionReport first_return_cdf(double t, const SurvivalSeries& series,
                                 const InversionMethod& method = InversionMethod::talbot());

/// Density and distribution function of the n-fold excursion time,
/// inverted from h^(s)^n and h^(s)^n / s.
struct ExcursionLaw {
    double density = 0.0;
    double cdf = 0.0;
    double est_error = 0.0;  // larger of the two inversion estimates
};

ExcursionLaw h_n_time(double t, int n, const ModelParams& params,
                      const InversionMethod& method = InversionMethod::talbot(),
                      const SeriesControl& ctrl = {});
ExcursionLaw h_n_time(double t, int n, const SurvivalSeries& series,
                      const InversionMethod& method = InversionMethod::talbot());

/// Number of densities clipped to zero so far in this process.
std::uint64_t clipped_density_count() noexcept;

}  // namespace sojourn
