#pragma once

#include <optional>
#include <span>
#include <vector>

namespace sojourn {

/// The pair (p, alpha) defining the walk. Immutable once constructed.
class ModelParams {
public:
    /// Throws std::invalid_argument unless p is prime and alpha is positive
    /// and small enough that p^alpha is representable.
    ModelParams(int p, double alpha);

    int p() const noexcept { return p_; }
    double alpha() const noexcept { return alpha_; }

    /// log(p), cached because every rate is an exponential in it.
    double log_p() const noexcept { return log_p_; }

    bool recurrent() const noexcept { return alpha_ >= 1.0; }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
    int p_;
    double alpha_;
    double log_p_;
};

bool is_prime(int n) noexcept;

struct DerivedConstants {
    double gamma_p_neg_alpha;          // p-adic Gamma at -alpha, always negative
    double b_alpha;                    // total exit rate from the unit ball
    std::optional<double> c_alpha;     // return probability, alpha < 1 only
    double kernel_scale;               // -1 / gamma_p_neg_alpha
    std::optional<double> tail_gamma;  // (alpha - 1) / alpha, alpha > 1 only
};

DerivedConstants derive_constants(const ModelParams& params);

/// Exit rate of the unit ball obtained by summing the lumped upward rates
/// C (1 - 1/p) p^{-m alpha} over m >= 1 instead of the closed form.
double b_alpha_from_kernel(const ModelParams& params);

/// Transition-rate table of the walk observed through the level
/// k = log_p max(|x|_p, 1), truncated at `max_level`.
///
/// Upward jumps that would land beyond the cutoff are clipped onto the
/// cutoff level, so rows 0..K-1 keep their exact total exit rate. From the
/// cutoff level itself those jumps would be self-loops and are dropped.
class NormChainGenerator {
public:
    static constexpr int default_max_level = 40;

    NormChainGenerator(const ModelParams& params, int max_level = default_max_level);

    const ModelParams& params() const noexcept { return params_; }
    int max_level() const noexcept { return max_level_; }
    int levels() const noexcept { return max_level_ + 1; }

    double rate(int from, int to) const;
    double exit_rate(int level) const { return exit_rate_.at(static_cast<std::size_t>(level)); }

    /// Outgoing rates of one row, indexed by target level (diagonal is 0).
    std::span<const double> row(int level) const;

    /// Jump target for a uniform draw u in [0, 1): inverts the row's
    /// normalized cumulative rates. Undefined for absorbing rows.
    int sample_target(int level, double u) const;

    /// True when every outgoing rate underflowed to zero.
    bool absorbing(int level) const { return exit_rate(level) <= 0.0; }

private:
    ModelParams params_;
    int max_level_;
    std::vector<double> rates_;       // row-major (K+1) x (K+1)
    std::vector<double> cumulative_;  // row-major, normalized to 1
    std::vector<double> exit_rate_;
};

NormChainGenerator build_generator(const ModelParams& params,
                                   int max_level = NormChainGenerator::default_max_level);

}  // namespace sojourn
