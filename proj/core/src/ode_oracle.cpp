#include "sojourn/experiments.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace sojourn {

std::vector<OdePoint> ode_survival_oracle(const NormChainGenerator& gen, std::span<const double> t_grid,
                                          double tol) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<double>;
    if (!(tol > 0.0)) throw std::invalid_argument("ode_survival_oracle: tol must be positive");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= 0.0) || (i > 0 && t_grid[i] < t_grid[i - 1])) {
            throw std::invalid_argument("ode_survival_oracle: grid must be nonnegative and ascending");
        }
    }
    const int levels = gen.levels();
    // dP_j/dt = sum_k P_k q(k, j) - P_j q(j)
    auto rhs = [&gen, levels](const State& p, State& dp, double) {
        for (int j = 0; j < levels; ++j) dp[static_cast<std::size_t>(j)] = -p[static_cast<std::size_t>(j)] * gen.exit_rate(j);
        for (int k = 0; k < levels; ++k) {
            const double pk = p[static_cast<std::size_t>(k)];
            if (pk == 0.0) continue;
            const auto row = gen.row(k);
            for (int j = 0; j < levels; ++j) dp[static_cast<std::size_t>(j)] += pk * row[static_cast<std::size_t>(j)];
        }
    };

    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(tol, tol);
    State p(static_cast<std::size_t>(levels), 0.0);
    p[0] = 1.0;
    double now = 0.0;
    double dt = 1e-3;
    std::vector<OdePoint> out;
    out.reserve(t_grid.size());
    for (double target : t_grid) {
        while (now < target) {
            // try_step returns the next proposal in `step` on success and a reduced one on failure
            double step = std::min(dt, target - now);
            if (stepper.try_step(rhs, p, now, step) == odeint::fail &&
                step < 1e-14 * std::max(1.0, now)) {
                throw NumericalError("ode_survival_oracle: step size underflow at t=" + std::to_string(now));
            }
            dt = step;
        }
        out.push_back({target, p[0]});
    }
    return out;
}

}  // namespace sojourn
