#include "sojourn/model.hpp"

#include "sojourn/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sojourn {

bool is_prime(int n) noexcept {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (int d = 3; d <= n / d; d += 2) {
        if (n % d == 0) return false;
    }
    return true;
}

ModelParams::ModelParams(int p, double alpha) : p_(p), alpha_(alpha), log_p_(std::log(static_cast<double>(p))) {
    if (!is_prime(p)) {
        throw std::invalid_argument("p must be prime, got " + std::to_string(p));
    }
    if (!std::isfinite(alpha) || !(alpha > 0.0)) {
        throw std::invalid_argument("alpha must be positive and finite");
    }
    // p^alpha must stay finite for the kernel scale.
    if (alpha * log_p_ > 700.0) {
        throw std::invalid_argument("alpha too large: p^alpha overflows double precision");
    }
}

DerivedConstants derive_constants(const ModelParams& params) {
    const long double lp = std::log(static_cast<long double>(params.p()));
    const long double a = params.alpha();
    const long double p = params.p();

    // 1 - p^{-alpha-1} and 1 - p^{alpha}, written to avoid cancellation.
    const long double one_minus_inv = -std::expm1(-(a + 1.0L) * lp);
    const long double one_minus_pa = -std::expm1(a * lp);

    DerivedConstants c{};
    const long double gamma_p = one_minus_inv / one_minus_pa;
    c.gamma_p_neg_alpha = static_cast<double>(gamma_p);
    c.kernel_scale = static_cast<double>(-1.0L / gamma_p);
    c.b_alpha = static_cast<double>((1.0L - 1.0L / p) / one_minus_inv);
    if (a < 1.0L) {
        const long double ratio = std::expm1(a * lp) / (p - 1.0L);
        c.c_alpha = static_cast<double>(std::exp((1.0L - a) * lp) * ratio * ratio);
    }
    if (a > 1.0L) {
        c.tail_gamma = static_cast<double>((a - 1.0L) / a);
    }
    return c;
}

double b_alpha_from_kernel(const ModelParams& params) {
    const long double lp = std::log(static_cast<long double>(params.p()));
    const long double a = params.alpha();
    const long double p = params.p();
    const long double scale = std::expm1(a * lp) / -std::expm1(-(a + 1.0L) * lp);
    // sum_{m>=1} p^{-m alpha} = 1 / (p^alpha - 1)
    return static_cast<double>(scale * (1.0L - 1.0L / p) / std::expm1(a * lp));
}

NormChainGenerator::NormChainGenerator(const ModelParams& params, int max_level)
    : params_(params), max_level_(max_level) {
    if (max_level < 1) {
        throw std::invalid_argument("max_level must be at least 1");
    }
    const auto n = static_cast<std::size_t>(levels());
    rates_.assign(n * n, 0.0);
    cumulative_.assign(n * n, 0.0);
    exit_rate_.assign(n, 0.0);

    const double a = params.alpha();
    const double lp = params.log_p();
    const double log_scale = std::log(derive_constants(params).kernel_scale);
    const double log_shell = std::log1p(-1.0 / params.p());  // log(1 - 1/p)
    const int K = max_level_;

    auto up_rate = [&](int m) {
        if (m < K) return std::exp(log_scale + log_shell - m * a * lp);
        // everything from K upward, summed geometrically
        return std::exp(log_scale + log_shell - K * a * lp - std::log(-std::expm1(-a * lp)));
    };

    for (int k = 0; k <= K; ++k) {
        double* row = &rates_[static_cast<std::size_t>(k) * n];
        if (k > 0) {
            const double down = log_scale - k * (a + 1.0) * lp;
            row[0] = std::exp(down);
            for (int j = 1; j < k; ++j) {
                row[j] = std::exp(down + j * lp + log_shell);
            }
        }
        if (k < K) {
            for (int m = k + 1; m <= K; ++m) row[m] = up_rate(m);
        }

        CompensatedSum<double> total;
        for (int j = 0; j <= K; ++j) total += row[j];
        exit_rate_[static_cast<std::size_t>(k)] = total.value();

        double* cum = &cumulative_[static_cast<std::size_t>(k) * n];
        if (total.value() > 0.0) {
            CompensatedSum<double> running;
            int last_nonzero = 0;
            for (int j = 0; j <= K; ++j) {
                running += row[j];
                cum[j] = running.value() / total.value();
                if (row[j] > 0.0) last_nonzero = j;
            }
            for (int j = last_nonzero; j <= K; ++j) cum[j] = 1.0;
        }
    }
}

double NormChainGenerator::rate(int from, int to) const {
    if (from < 0 || from > max_level_ || to < 0 || to > max_level_) {
        throw std::out_of_range("level outside [0, max_level]");
    }
    return rates_[static_cast<std::size_t>(from) * static_cast<std::size_t>(levels()) +
                  static_cast<std::size_t>(to)];
}

std::span<const double> NormChainGenerator::row(int level) const {
    if (level < 0 || level > max_level_) throw std::out_of_range("level outside [0, max_level]");
    const auto n = static_cast<std::size_t>(levels());
    return {rates_.data() + static_cast<std::size_t>(level) * n, n};
}

int NormChainGenerator::sample_target(int level, double u) const {
    const auto n = static_cast<std::size_t>(levels());
    const double* first = cumulative_.data() + static_cast<std::size_t>(level) * n;
    const double* hit = std::upper_bound(first, first + n, u);
    return static_cast<int>(std::min<std::ptrdiff_t>(hit - first, static_cast<std::ptrdiff_t>(n) - 1));
}

NormChainGenerator build_generator(const ModelParams& params, int max_level) {
    return NormChainGenerator(params, max_level);
}

}  // namespace sojourn
