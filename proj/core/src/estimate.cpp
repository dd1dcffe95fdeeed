#include "sojourn/estimate.hpp"

#include "sojourn/series.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace sojourn {

Estimate Estimate::from_samples(std::span<const double> samples) {
    Estimate e;
    e.n = static_cast<std::int64_t>(samples.size());
    if (samples.empty()) return e;
    CompensatedSum<double> sum;
    for (double x : samples) sum += x;
    e.value = sum.value() / static_cast<double>(samples.size());
    if (samples.size() < 2) return e;
    CompensatedSum<double> squares;
    for (double x : samples) squares += (x - e.value) * (x - e.value);
    const double var = squares.value() / static_cast<double>(samples.size() - 1);
    e.std_error = std::sqrt(var / static_cast<double>(samples.size()));
    return e;
}

Estimate merge(const Estimate& a, const Estimate& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    const double na = static_cast<double>(a.n);
    const double nb = static_cast<double>(b.n);
    const double n = na + nb;
    // sum of squared deviations of each part, recovered from its std_error
    auto m2 = [](const Estimate& e) {
        const double k = static_cast<double>(e.n);
        return e.std_error * e.std_error * k * (k - 1.0);
    };
    const double delta = b.value - a.value;
    const double total_m2 = m2(a) + m2(b) + delta * delta * na * nb / n;
    Estimate out;
    out.n = a.n + b.n;
    out.value = (na * a.value + nb * b.value) / n;
    out.std_error = std::sqrt(total_m2 / (n - 1.0) / n);
    return out;
}

bool Estimate::within(double target, double k) const { return std::abs(value - target) <= k * std_error; }

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
    if (x.size() < 5) throw std::invalid_argument("fit_power_law: at least 5 points are required");
    const std::size_t n = x.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_power_law: data must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit_power_law: x values must not all coincide");
    PowerLawFit fit;
    fit.points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double sse = std::max(0.0, syy - fit.slope * sxy);
    fit.slope_stderr = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
    fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    fit.x_lo = *lo;
    fit.x_hi = *hi;
    return fit;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi >= lo) || n < 2) throw std::invalid_argument("log_grid: need 0 < lo <= hi and n >= 2");
    std::vector<double> grid(n);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n || failed.load(std::memory_order_relaxed)) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
                return;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    pool.clear();
    if (error) std::rethrow_exception(error);
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf,
                   const std::function<double(double)>& left_limit) {
    if (samples.empty()) throw std::invalid_argument("ks_distance: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < samples.size()) {
        std::size_t j = i;
        while (j < samples.size() && samples[j] == samples[i]) ++j;
        const double x = samples[i];
        const double below = static_cast<double>(i) / n;  // F_n(x-)
        const double at = static_cast<double>(j) / n;     // F_n(x)
        const double f = cdf(x);
        const double f_left = left_limit ? left_limit(x) : f;
        d = std::max({d, std::abs(at - f), std::abs(below - f_left)});
        i = j;
    }
    return d;
}

double ks_critical_1pct(std::size_t n) {
    if (n == 0) throw std::invalid_argument("ks_critical_1pct: n must be positive");
    return 1.628 / std::sqrt(static_cast<double>(n));
}

}  // namespace sojourn
