#pragma once

#include "sojourn/model.hpp"
#include "sojourn/series.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace sojourn {

/// Per-path random stream. Path `index` of an ensemble seeded with `seed`
/// draws from mt19937_64 initialized through seed_seq{seed, index}, so every
/// path is reproducible on its own and independent of how an ensemble is
/// split across workers.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t index);

    /// Uniform on (0, 1], 53 random bits.
    double uniform() noexcept {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Unit-rate exponential.
    double exponential() noexcept { return -std::log(uniform()); }

private:
    std::mt19937_64 engine_;
};

struct LevelHolding {
    int level = 0;
    double holding = 0.0;

    friend bool operator==(const LevelHolding&, const LevelHolding&) = default;
};

/// One path of the level process on [0, horizon]. The holdings of `events`
/// sum to at least the horizon; the last one is cut there by the
/// functionals.
struct Trajectory {
    ModelParams params;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    int cutoff = 0;
    std::vector<LevelHolding> events;
};

struct TrajectoryFunctionals {
    double sojourn = 0.0;
    double complement_sojourn = 0.0;
    std::optional<double> first_return;
    bool returned = false;
    std::int64_t visits_to_zero = 0;
    int max_level = 0;
};

/// Event-driven walk of the level chain started at level 0. `visit(level,
/// start, holding)` is called once per sojourn in a level, in time order,
/// until the clock passes `horizon` or the visitor returns false. The
/// clock is a compensated sum of the holdings.
template <class Visitor>
void walk_levels(const NormChainGenerator& gen, double horizon, PathRng& rng, Visitor&& visit) {
    int level = 0;
    CompensatedSum<double> clock;
    for (;;) {
        const double rate = gen.exit_rate(level);
        const double holding =
            rate > 0.0 ? rng.exponential() / rate : std::numeric_limits<double>::infinity();
        const double start = clock.value();
        if (!visit(level, start, holding)) return;
        clock += holding;
        if (!(clock.value() < horizon)) return;
        level = gen.sample_target(level, rng.uniform());
    }
}

Trajectory sample_path(const NormChainGenerator& gen, double horizon, std::uint64_t seed,
                       std::uint64_t index = 0);

/// Functionals on [0, t]; t must not exceed the horizon.
TrajectoryFunctionals functionals(const Trajectory& path, double t);

/// Time spent at level 0 during [t_a, t_a + t].
double sojourn_increment(const Trajectory& path, double t_a, double t);

/// Level-0 occupation at each of the ascending `times`, from one streamed
/// path (no event storage). The path is run to times.back().
std::vector<double> sojourn_profile(const NormChainGenerator& gen, std::span<const double> times,
                                    std::uint64_t seed, std::uint64_t index);

/// First-excursion outcome of one streamed path, stopped at the first
/// return or at the horizon.
struct FirstReturn {
    std::optional<double> time;
    double first_holding = 0.0;
    int max_level = 0;
};
FirstReturn first_return_time(const NormChainGenerator& gen, double horizon, std::uint64_t seed,
                              std::uint64_t index);

}  // namespace sojourn
