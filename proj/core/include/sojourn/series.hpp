#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace sojourn {

/// Raised when a numerical procedure cannot meet its own accuracy contract
/// (series non-convergence, inversion disagreement, quadrature failure,
/// fit non-convergence, ODE step underflow).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Truncation policy shared by the infinite-series evaluators.
struct SeriesControl {
    double abs_tol = 1e-15;
    double rel_tol = 1e-14;
    int max_terms = 2000;

    /// Throws std::invalid_argument on non-positive tolerances or
    /// max_terms < 8.
    void validate() const;

    /// Stop criterion for a remainder bound given the current partial sum.
    bool converged(double remainder_bound, double partial_sum) const noexcept {
        return remainder_bound <= abs_tol || remainder_bound <= rel_tol * std::abs(partial_sum);
    }
};

/// Neumaier-compensated accumulator.
template <class T = double>
class CompensatedSum {
public:
    CompensatedSum& operator+=(T x) noexcept {
        const T t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
        return *this;
    }

    T value() const noexcept { return sum_ + carry_; }

private:
    T sum_{};
    T carry_{};
};

}  // namespace sojourn
