#include "sojourn/transforms.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <string>

namespace sojourn {

namespace {

std::atomic<std::uint64_t> clip_counter{0};

/// Applies the clipping rule to an inverted density.
InversionReport clip_density(InversionReport report, const char* what) {
    if (report.value >= 0.0) return report;
    if (-report.value <= 2.0 * report.est_error) {
        report.value = 0.0;
        report.clipped = true;
        clip_counter.fetch_add(1, std::memory_order_relaxed);
        return report;
    }
    throw NumericalError(std::string(what) + ": negative density " + std::to_string(report.value) + " at t=" +
                         std::to_string(report.t));
}

void check_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("time argument must be positive and finite");
}

}  // namespace

std::uint64_t clipped_density_count() noexcept { return clip_counter.load(std::memory_order_relaxed); }

InversionReport first_return_density(double t, const SurvivalSeries& series, const InversionMethod& method) {
    check_time(t);
    auto transform = [&series](std::complex<double> s) { return series.first_return_transform(s); };
    return clip_density(invert(transform, t, method), "first_return_density");
}

InversionReport first_return_density(double t, const ModelParams& params, const InversionMethod& method,
                                     const SeriesControl& ctrl) {
    return first_return_density(t, SurvivalSeries(params, ctrl), method);
}

InversionReport first_return_cdf(double t, const SurvivalSeries& series, const InversionMethod& method) {
    check_time(t);
    auto transform = [&series](std::complex<double> s) { return series.first_return_transform(s) / s; };
    auto report = invert(transform, t, method);
    report.value = std::clamp(report.value, 0.0, 1.0);
    return report;
}

ExcursionLaw h_n_time(double t, int n, const SurvivalSeries& series, const InversionMethod& method) {
    check_time(t);
    if (n < 1) throw std::invalid_argument("h_n_time: n must be at least 1");
    auto power = [&series, n](std::complex<double> s) { return std::pow(series.excursion_transform(s), n); };
    auto density = clip_density(invert(power, t, method), "h_n_time");
    auto cdf = invert([&power](std::complex<double> s) { return power(s) / s; }, t, method);
    return {density.value, std::clamp(cdf.value, 0.0, 1.0), std::max(density.est_error, cdf.est_error)};
}

ExcursionLaw h_n_time(double t, int n, const ModelParams& params, const InversionMethod& method,
                      const SeriesControl& ctrl) {
    return h_n_time(t, n, SurvivalSeries(params, ctrl), method);
}

}  // namespace sojourn
