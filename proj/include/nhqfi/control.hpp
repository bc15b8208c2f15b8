#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nhqfi/lindblad.hpp"
#include "nhqfi/metrology.hpp"

namespace nhqfi {

/// Piecewise-constant amplitudes (u_x, u_y, u_z), one row per interval of
/// length horizon_T / n_intervals.
struct ControlSchedule {
    double horizon_T = 10.0;
    int n_intervals = 100;
    Eigen::MatrixX3d amplitudes = Eigen::MatrixX3d::Zero(100, 3);
    double amplitude_bound = 0.0;  ///< 0 = unbounded

    static ControlSchedule zeros(double horizon_T, int n_intervals, double amplitude_bound = 0.0);
    void validate() const;
    double interval_length() const { return horizon_T / n_intervals; }
};

struct OptimizationReport {
    int iterations = 0;
    std::vector<double> objective_trace;
    ControlSchedule final_schedule;
    bool converged = false;
    std::string message;  ///< stop reason, or the error that aborted the run
    int substeps = 0;
};

struct OptimizeOptions {
    int max_iter = 200;
    double grad_step = 1e-4;
    double learning_rate = 1.0;
    double ftol = 1e-10;
    int substeps = 0;  ///< per interval; 0 = fixed from the initial schedule
    std::optional<double> fd_step;
};

/// u_x S_x + u_y S_y + u_z S_z with S_k = Σ_j σ_j^k on 2^N dimensions.
Operator control_hamiltonian(const Eigen::Vector3d& u, int n_sites);

/// Column-stacked superoperator of ρ ↦ −i[H, ρ].
Operator commutator_superoperator(const Operator& h);

/// Substeps per interval such that every interval's controlled Liouvillian
/// satisfies the RK4 step rule.
int control_substeps(const LindbladSpec& spec, const ControlSchedule& schedule);

/// ρ at every interval boundary under H₊ + H_c(u_k), dissipator unchanged.
std::vector<DensityMatrix> evolve_controlled(const LindbladSpec& spec, const ControlSchedule& schedule,
                                             const DensityMatrix& rho0, int substeps = 0);

/// SLD QFI of ρ(T) with respect to `param`; controls are held fixed while θ
/// is varied. The model supplies the Lindblad data at θ and θ ± h.
double objective_qfi(const ControlSchedule& schedule, const ModelSpec& model, const std::string& param,
                     const DensityMatrix& rho0, int substeps = 0, std::optional<double> fd_step = std::nullopt);

/// Central-difference gradient of objective_qfi with respect to every
/// amplitude (row-major over intervals, columns x, y, z).
Eigen::MatrixX3d objective_gradient(const ControlSchedule& schedule, const ModelSpec& model, const std::string& param,
                                    const DensityMatrix& rho0, double grad_step, int substeps,
                                    std::optional<double> fd_step = std::nullopt);

/// Gradient ascent with backtracking: the rate is halved until the objective
/// does not decrease, then grown by 1.5 for the next iteration.
OptimizationReport optimize_controls(const ControlSchedule& schedule0, const ModelSpec& model,
                                     const std::string& param, const DensityMatrix& rho0,
                                     const OptimizeOptions& options = {});

}  // namespace nhqfi
