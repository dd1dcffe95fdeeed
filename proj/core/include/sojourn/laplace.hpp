#pragma once

#include <complex>
#include <functional>
#include <string_view>
#include <vector>

namespace sojourn {

using RealTransform = std::function<double(double)>;
using ComplexTransform = std::function<std::complex<double>(std::complex<double>)>;

/// Numerical inverse Laplace transform configuration.
///
/// Two families are provided. The real-axis Gaver-Stehfest scheme only
/// samples the transform at s > 0; the fixed-Talbot contour samples it on a
/// path that encloses the whole negative real axis, which is where every
/// singularity of the transforms in this library lives.
struct InversionMethod {
    enum class Kind { GaverStehfest, Talbot };

    Kind kind = Kind::Talbot;
    int order = 24;
    /// Target significant digits. An inversion whose successive-order
    /// disagreement exceeds 10^-work_precision (absolute below 1, relative
    /// above) is reported as a failure.
    double work_precision = 8.0;

    static InversionMethod talbot(int order = 24, double digits = 8.0) {
        return {Kind::Talbot, order, digits};
    }
    static InversionMethod stehfest(int order = 14, double digits = 4.0) {
        return {Kind::GaverStehfest, order, digits};
    }

    /// Throws std::invalid_argument: real-axis order must be even and >= 8,
    /// contour order >= 16.
    void validate() const;

    double tolerance(double value) const;
    std::string_view name() const noexcept;
};

struct InversionReport {
    double t = 0.0;
    double value = 0.0;
    /// |value(order) - value(order - 2)|; a heuristic, not a bound.
    double est_error = 0.0;
    InversionMethod method;
    bool clipped = false;
};

/// One quadrature node of the fixed-Talbot rule:
///   f(t) ~ sum_k Re(weight_k * F(s_k)).
struct ContourNode {
    std::complex<double> s;
    std::complex<double> weight;
};

std::vector<ContourNode> talbot_nodes(double t, int order);

/// Node set of either family; Gaver-Stehfest nodes lie on the positive real
/// axis with real weights. Lets callers evaluate an expensive transform once
/// per node and reuse it for many originals.
std::vector<ContourNode> inversion_nodes(InversionMethod::Kind kind, double t, int order);

/// Gaver-Stehfest weights V_1..V_N (index 0 holds V_1).
const std::vector<double>& stehfest_weights(int order);

/// Single-order evaluations, no error estimate.
double talbot_value(const ComplexTransform& transform, double t, int order);
double stehfest_value(const RealTransform& transform, double t, int order);

/// Inverts at time t > 0 with the requested family. The real-axis method
/// evaluates the complex callable on the positive real axis and keeps the
/// real part. Throws NumericalError when the order-vs-(order-2)
/// disagreement exceeds the method tolerance or a node evaluation is not
/// finite.
InversionReport invert(const ComplexTransform& transform, double t, const InversionMethod& method);
InversionReport invert(const RealTransform& transform, double t, const InversionMethod& method);

/// Same as invert() but returns the report without enforcing the tolerance.
InversionReport invert_unchecked(const ComplexTransform& transform, double t, const InversionMethod& method);

}  // namespace sojourn
