#pragma once

#include <algorithm>
#include <cmath>

namespace nhqfi {

/// One classical fourth-order Runge-Kutta step for an autonomous system y' = f(y).
template <class State, class Rhs>
State rk4_step(const Rhs& f, const State& y, double h) {
    const State k1 = f(y);
    const State k2 = f(State(y + (0.5 * h) * k1));
    const State k3 = f(State(y + (0.5 * h) * k2));
    const State k4 = f(State(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Substeps per interval of length `dt` so that each RK4 step satisfies
/// step·norm ≤ `scale`.
inline int auto_substeps(double dt, double generator_norm, double scale = 0.01) {
    const double n = std::ceil(std::abs(dt) * generator_norm / scale);
    return std::max(1, static_cast<int>(std::min(n, 1e9)));
}

}  // namespace nhqfi
