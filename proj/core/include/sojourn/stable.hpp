#pragma once

#include "sojourn/series.hpp"

#include <complex>

namespace sojourn {

/// One-sided stable law of index gamma in (0, 1), normalized so that its
/// Laplace transform is exp(-Gamma(1 - gamma) s^gamma). At gamma = 1/2 this
/// is the Levy law with density t^{-3/2} exp(-pi / (4 t)) / 2.

struct StableSeriesOptions {
    /// The power series in t^{-gamma} is only used on t >= min_t.
    double min_t = 0.5;
    SeriesControl ctrl{1e-17, 1e-16, 20000};
};

/// Power series of the density in t^{-gamma}:
///   (1/pi) sum_{n>=1} (-1)^{n+1} a^n sin(n pi gamma) Gamma(n gamma + 1) / n! t^{-n gamma - 1},
/// a = Gamma(1 - gamma). The terms grow enormously before they decay when
/// gamma > 1/2, so the sum runs in MPFR arithmetic with enough digits to
/// absorb the cancellation. Throws std::invalid_argument below min_t and
/// NumericalError if the term-magnitude stop is not reached in max_terms.
double stable_density_series(double t, double gamma, const StableSeriesOptions& options = {});

/// The same density from its Fourier integral, rotated off the real axis:
///   f(t) = (1/pi) Re[ e^{i phi} int_0^inf exp(-i t r e^{i phi} - a e^{-i pi gamma / 2} (r e^{i phi})^gamma) dr ].
/// For gamma < 1/2 the ray is phi = -pi/2, giving the decaying real-axis
/// form; for larger gamma the ray is rotated only part way so that both
/// exponents keep decaying. Integrated with a double-exponential rule;
/// throws NumericalError when the error estimate exceeds abs_tol.
double stable_density_quadrature(double t, double gamma, double abs_tol = 1e-10);

/// Ray angle used by stable_density_quadrature.
double stable_contour_angle(double gamma);

/// Laplace transform exp(-Gamma(1 - gamma) s^gamma).
std::complex<double> stable_laplace(std::complex<double> s, double gamma);

/// Distribution function F(y), by quadrature along the same ray as the
/// density. F(0) = 0.
double stable_cdf(double y, double gamma);

/// int_0^inf f(t) dt by nested quadrature of stable_density_quadrature.
double stable_normalization(double gamma);

}  // namespace sojourn
