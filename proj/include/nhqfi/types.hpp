#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nhqfi {

using Complex = std::complex<double>;

/// Dense square complex matrix (Hamiltonian, jump operator, generator).
using Operator = Eigen::MatrixXcd;
/// Right (ket) state. Left states use the same storage; the pairing is by role.
using StateVector = Eigen::VectorXcd;
using LeftStateVector = Eigen::VectorXcd;
/// Possibly non-normalized mixed state.
using DensityMatrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Uniform time grid, t_k = t_start + k (t_end - t_start) / n_steps, k = 0..n_steps.
struct TimeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    int n_steps = 1;

    double step() const { return (t_end - t_start) / n_steps; }
    double time(int k) const { return t_start + k * step(); }
    std::vector<double> times() const;
    void validate() const;
};

}  // namespace nhqfi
