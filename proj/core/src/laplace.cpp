#include "sojourn/laplace.hpp"

#include "sojourn/series.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sojourn {

void InversionMethod::validate() const {
    switch (kind) {
    case Kind::GaverStehfest:
        if (order < 8 || order % 2 != 0) {
            throw std::invalid_argument("Gaver-Stehfest order must be even and at least 8");
        }
        break;
    case Kind::Talbot:
        if (order < 16) throw std::invalid_argument("Talbot order must be at least 16");
        break;
    }
    if (!(work_precision > 0.0)) throw std::invalid_argument("work_precision must be positive");
}

double InversionMethod::tolerance(double value) const {
    return std::pow(10.0, -work_precision) * std::max(1.0, std::abs(value));
}

std::string_view InversionMethod::name() const noexcept {
    return kind == Kind::Talbot ? "talbot" : "stehfest";
}

std::vector<ContourNode> talbot_nodes(double t, int order) {
    if (!(t > 0.0)) throw std::invalid_argument("talbot_nodes: t must be positive");
    using namespace std::complex_literals;
    constexpr double pi = std::numbers::pi;
    const int M = order;
    const double r = 2.0 * M / (5.0 * t);

    std::vector<ContourNode> nodes;
    nodes.reserve(static_cast<std::size_t>(M));
    nodes.push_back({r, 0.5 * (r / M) * std::exp(r * t)});
    for (int k = 1; k < M; ++k) {
        const double theta = k * pi / M;
        const double cot = std::cos(theta) / std::sin(theta);
        const std::complex<double> s = r * theta * (cot + 1.0i);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        nodes.push_back({s, (r / M) * std::exp(t * s) * (1.0 + 1.0i * sigma)});
    }
    return nodes;
}

namespace {

std::vector<double> compute_stehfest_weights(int order) {
    using big = boost::multiprecision::cpp_bin_float_50;
    const int half = order / 2;
    auto fact = [](int n) {
        big f = 1;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    std::vector<double> v(static_cast<std::size_t>(order));
    for (int k = 1; k <= order; ++k) {
        big sum = 0;
        for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
            big term = boost::multiprecision::pow(big(j), half) * fact(2 * j);
            term /= fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k);
            sum += term;
        }
        if ((k + half) % 2 != 0) sum = -sum;
        v[static_cast<std::size_t>(k - 1)] = static_cast<double>(sum);
    }
    return v;
}

void require_finite(double x, std::string_view what) {
    if (!std::isfinite(x)) {
        throw NumericalError(std::string("inversion: non-finite transform value at ") + std::string(what));
    }
}

}  // namespace

const std::vector<double>& stehfest_weights(int order) {
    static std::mutex mutex;
    static std::map<int, std::vector<double>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_stehfest_weights(order)).first;
    return it->second;
}

std::vector<ContourNode> inversion_nodes(InversionMethod::Kind kind, double t, int order) {
    if (kind == InversionMethod::Kind::Talbot) return talbot_nodes(t, order);
    if (!(t > 0.0)) throw std::invalid_argument("inversion_nodes: t must be positive");
    const auto& weights = stehfest_weights(order);
    const double step = std::numbers::ln2 / t;
    std::vector<ContourNode> nodes;
    nodes.reserve(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) {
        nodes.push_back({static_cast<double>(k + 1) * step, weights[k] * step});
    }
    return nodes;
}

double talbot_value(const ComplexTransform& transform, double t, int order) {
    CompensatedSum<double> sum;
    for (const auto& node : talbot_nodes(t, order)) {
        const std::complex<double> F = transform(node.s);
        require_finite(F.real(), "contour node");
        require_finite(F.imag(), "contour node");
        sum += (node.weight * F).real();
    }
    return sum.value();
}

double stehfest_value(const RealTransform& transform, double t, int order) {
    if (!(t > 0.0)) throw std::invalid_argument("stehfest: t must be positive");
    const auto& weights = stehfest_weights(order);
    const double step = std::numbers::ln2 / t;
    long double sum = 0.0L;
    for (int k = 1; k <= order; ++k) {
        const double F = transform(k * step);
        require_finite(F, "real-axis node");
        sum += static_cast<long double>(weights[static_cast<std::size_t>(k - 1)]) * F;
    }
    return static_cast<double>(sum * step);
}

InversionReport invert_unchecked(const ComplexTransform& transform, double t, const InversionMethod& method) {
    method.validate();
    if (!(t > 0.0)) throw std::invalid_argument("invert: t must be positive");
    InversionReport report{t, 0.0, 0.0, method, false};
    if (method.kind == InversionMethod::Kind::Talbot) {
        report.value = talbot_value(transform, t, method.order);
        report.est_error = std::abs(report.value - talbot_value(transform, t, method.order - 2));
    } else {
        RealTransform on_axis = [&](double s) { return transform(std::complex<double>(s, 0.0)).real(); };
        report.value = stehfest_value(on_axis, t, method.order);
        report.est_error = std::abs(report.value - stehfest_value(on_axis, t, method.order - 2));
    }
    return report;
}

InversionReport invert(const ComplexTransform& transform, double t, const InversionMethod& method) {
    InversionReport report = invert_unchecked(transform, t, method);
    if (report.est_error > method.tolerance(report.value)) {
        throw NumericalError("inversion (" + std::string(method.name()) + ", order " +
                             std::to_string(method.order) + ") at t=" + std::to_string(t) +
                             ": successive orders disagree by " + std::to_string(report.est_error));
    }
    return report;
}

InversionReport invert(const RealTransform& transform, double t, const InversionMethod& method) {
    if (method.kind == InversionMethod::Kind::Talbot) {
        throw std::invalid_argument("invert: the contour method needs a complex-valued transform");
    }
    method.validate();
    if (!(t > 0.0)) throw std::invalid_argument("invert: t must be positive");
    InversionReport report{t, stehfest_value(transform, t, method.order), 0.0, method, false};
    report.est_error = std::abs(report.value - stehfest_value(transform, t, method.order - 2));
    if (report.est_error > method.tolerance(report.value)) {
        throw NumericalError("inversion (stehfest, order " + std::to_string(method.order) + ") at t=" +
                             std::to_string(t) + ": successive orders disagree by " +
                             std::to_string(report.est_error));
    }
    return report;
}

}  // namespace sojourn
