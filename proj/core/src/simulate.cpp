#include "sojourn/simulate.hpp"

#include <algorithm>
#include <stdexcept>

namespace sojourn {

PathRng::PathRng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
}

Trajectory sample_path(const NormChainGenerator& gen, double horizon, std::uint64_t seed, std::uint64_t index) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("sample_path: horizon must be finite and nonnegative");
    }
    Trajectory path{gen.params(), horizon, seed, index, gen.max_level(), {}};
    PathRng rng(seed, index);
    walk_levels(gen, horizon, rng, [&](int level, double, double holding) {
        path.events.push_back({level, holding});
        return true;
    });
    return path;
}

TrajectoryFunctionals functionals(const Trajectory& path, double t) {
    if (!(t >= 0.0) || t > path.horizon) throw std::invalid_argument("functionals: t must lie in [0, horizon]");
    TrajectoryFunctionals out;
    CompensatedSum<double> clock;
    CompensatedSum<double> inside;
    bool left = false;
    for (const auto& e : path.events) {
        const double start = clock.value();
        if (start > t || (start == t && t > 0.0)) break;
        const double end = std::min(start + e.holding, t);
        out.max_level = std::max(out.max_level, e.level);
        if (e.level == 0) {
            ++out.visits_to_zero;
            if (left && !out.returned) {
                out.returned = true;
                out.first_return = start;
            }
            inside += end - start;
        } else {
            left = true;
        }
        clock += e.holding;
    }
    out.sojourn = std::min(inside.value(), t);
    out.complement_sojourn = t - out.sojourn;
    return out;
}

double sojourn_increment(const Trajectory& path, double t_a, double t) {
    if (!(t_a >= 0.0) || !(t >= 0.0) || t_a + t > path.horizon) {
        throw std::invalid_argument("sojourn_increment: window must lie inside [0, horizon]");
    }
    return functionals(path, t_a + t).sojourn - functionals(path, t_a).sojourn;
}

std::vector<double> sojourn_profile(const NormChainGenerator& gen, std::span<const double> times,
                                    std::uint64_t seed, std::uint64_t index) {
    if (times.empty()) return {};
    if (!std::is_sorted(times.begin(), times.end()) || !(times.front() >= 0.0)) {
        throw std::invalid_argument("sojourn_profile: times must be ascending and nonnegative");
    }
    std::vector<double> out(times.size(), 0.0);
    std::size_t next = 0;
    CompensatedSum<double> inside;
    PathRng rng(seed, index);
    walk_levels(gen, times.back(), rng, [&](int level, double start, double holding) {
        const double end = start + holding;
        // record every checkpoint that falls inside this holding
        while (next < times.size() && times[next] <= end) {
            out[next] = inside.value() + (level == 0 ? times[next] - start : 0.0);
            ++next;
        }
        if (level == 0) inside += holding;
        return next < times.size();
    });
    return out;
}

FirstReturn first_return_time(const NormChainGenerator& gen, double horizon, std::uint64_t seed,
                              std::uint64_t index) {
    FirstReturn out;
    PathRng rng(seed, index);
    bool left = false;
    walk_levels(gen, horizon, rng, [&](int level, double start, double holding) {
        out.max_level = std::max(out.max_level, level);
        if (level == 0) {
            if (left) {
                if (start <= horizon) out.time = start;
                return false;
            }
            out.first_holding = holding;
        } else {
            left = true;
        }
        return true;
    });
    return out;
}

}  // namespace sojourn
