#include "nhqfi/control.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "nhqfi/errors.hpp"
#include "nhqfi/operators.hpp"
#include "nhqfi/rk4.hpp"

namespace nhqfi {

ControlSchedule ControlSchedule::zeros(double horizon_T, int n_intervals, double amplitude_bound) {
    ControlSchedule out;
    out.horizon_T = horizon_T;
    out.n_intervals = n_intervals;
    out.amplitudes = Eigen::MatrixX3d::Zero(std::max(n_intervals, 0), 3);
    out.amplitude_bound = amplitude_bound;
    out.validate();
    return out;
}

void ControlSchedule::validate() const {
    if (!(std::isfinite(horizon_T) && horizon_T > 0.0)) throw ContractError("ControlSchedule: horizon_T must be > 0");
    if (n_intervals < 1) throw ContractError("ControlSchedule: n_intervals must be >= 1");
    if (amplitudes.rows() != n_intervals)
        throw ContractError("ControlSchedule: amplitudes must have n_intervals rows");
    if (!amplitudes.allFinite()) throw ContractError("ControlSchedule: non-finite amplitude");
    if (!(std::isfinite(amplitude_bound) && amplitude_bound >= 0.0))
        throw ContractError("ControlSchedule: amplitude_bound must be >= 0");
    if (amplitude_bound > 0.0 && amplitudes.cwiseAbs().maxCoeff() > amplitude_bound)
        throw ContractError("ControlSchedule: amplitude exceeds amplitude_bound");
}

Operator control_hamiltonian(const Eigen::Vector3d& u, int n_sites) {
    if (n_sites < 1) throw ContractError("control_hamiltonian: n_sites must be >= 1");
    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    Operator out = Operator::Zero(dim, dim);
    const std::array<Axis, 3> axes{Axis::X, Axis::Y, Axis::Z};
    for (int a = 0; a < 3; ++a) {
        if (u(a) == 0.0) continue;
        for (int j = 1; j <= n_sites; ++j) out += u(a) * site_operator(axes[a], j, n_sites);
    }
    return out;
}

Operator commutator_superoperator(const Operator& h) {
    require_square(h, "commutator_superoperator");
    const Operator id = Operator::Identity(h.rows(), h.cols());
    return -kI * (kron(id, h) - kron(h.transpose(), id));
}

namespace {

double inf_norm(const Operator& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

int n_sites_for(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    if ((Eigen::Index{1} << n) != dim) throw ContractError("control: Hilbert-space dimension is not a power of two");
    return n;
}

/// The three control superoperators C_a so that L(u) = L₀ + Σ u_a C_a.
struct ControlledGenerator {
    Operator base;
    std::array<Operator, 3> drive;
    Eigen::Index dim;

    ControlledGenerator(const LindbladSpec& spec) : base(liouvillian(spec)), dim(spec.dim()) {
        const int n = n_sites_for(dim);
        for (int a = 0; a < 3; ++a)
            drive[a] = commutator_superoperator(control_hamiltonian(Eigen::Vector3d::Unit(a), n));
    }

    Operator at(const Eigen::Vector3d& u) const {
        Operator l = base;
        for (int a = 0; a < 3; ++a)
            if (u(a) != 0.0) l += u(a) * drive[a];
        return l;
    }
};

DensityMatrix advance_interval(const ControlledGenerator& gen, const Eigen::Vector3d& u, const DensityMatrix& rho,
                               double dt, int n_sub) {
    const MasterPropagator prop(gen.at(u), gen.dim, dt / n_sub);
    return hermitize(prop.advance(rho, n_sub));
}

int substeps_for(const ControlledGenerator& gen, const ControlSchedule& schedule) {
    int n = 1;
    for (Eigen::Index k = 0; k < schedule.amplitudes.rows(); ++k)
        n = std::max(n, auto_substeps(schedule.interval_length(), inf_norm(gen.at(schedule.amplitudes.row(k)))));
    return n;
}

std::vector<DensityMatrix> run_schedule(const ControlledGenerator& gen, const ControlSchedule& schedule,
                                        const DensityMatrix& rho0, int n_sub) {
    std::vector<DensityMatrix> out;
    out.reserve(static_cast<std::size_t>(schedule.n_intervals) + 1);
    out.push_back(hermitize(rho0));
    for (int k = 0; k < schedule.n_intervals; ++k)
        out.push_back(advance_interval(gen, schedule.amplitudes.row(k), out.back(), schedule.interval_length(), n_sub));
    return out;
}

void check_final_state(const DensityMatrix& rho, const char* what) {
    try {
        validate_density_matrix(rho, what);
    } catch (const ContractError& e) {
        throw IntegrationError(e.what());
    }
}

/// Lindblad data at θ, θ + h and θ − h.
struct ParameterFamily {
    double step;
    std::array<ControlledGenerator, 3> gens;

    static ParameterFamily make(const ModelSpec& model, const std::string& param, std::optional<double> fd_step) {
        const double theta = model.parameters().get(param);
        const double h = fd_step.value_or(default_fd_step(theta));
        if (!(h > 0.0)) throw ContractError("objective_qfi: fd_step must be positive");
        return {h,
                {ControlledGenerator(model.lindblad()), ControlledGenerator(model.with_parameter(param, theta + h).lindblad()),
                 ControlledGenerator(model.with_parameter(param, theta - h).lindblad())}};
    }
};

void check_inputs(const ControlSchedule& schedule, const ModelSpec& model, const std::string& param,
                  const DensityMatrix& rho0, int substeps) {
    schedule.validate();
    if (!model.parameters().contains(param)) throw ContractError("objective_qfi: unknown parameter '" + param + "'");
    if (rho0.rows() != model.dim() || rho0.cols() != model.dim())
        throw ContractError("objective_qfi: rho0 dimension does not match the model");
    validate_density_matrix(rho0, "objective_qfi");
    if (substeps < 0) throw ContractError("objective_qfi: substeps must be >= 0");
}

double family_objective(const ParameterFamily& fam, const ControlSchedule& schedule, const DensityMatrix& rho0,
                        int n_sub) {
    std::array<DensityMatrix, 3> finals;
    for (int v = 0; v < 3; ++v) finals[v] = run_schedule(fam.gens[v], schedule, rho0, n_sub).back();
    check_final_state(finals[0], "objective_qfi");
    return qfi_from_central_difference(finals[0], finals[1], finals[2], fam.step);
}

Eigen::MatrixX3d family_gradient(const ParameterFamily& fam, const ControlSchedule& schedule, const DensityMatrix& rho0,
                                 double grad_step, int n_sub) {
    const int m = schedule.n_intervals;
    const double dt = schedule.interval_length();
    const Eigen::Index d2 = rho0.size();
    std::array<std::vector<DensityMatrix>, 3> prefix;
    std::array<std::vector<Operator>, 3> suffix;  // suffix[v][k] maps ρ after interval k to ρ(T)
    for (int v = 0; v < 3; ++v) {
        prefix[v] = run_schedule(fam.gens[v], schedule, rho0, n_sub);
        suffix[v].assign(static_cast<std::size_t>(m), Operator::Identity(d2, d2));
        for (int k = m - 2; k >= 0; --k) {
            const MasterPropagator prop(fam.gens[v].at(schedule.amplitudes.row(k + 1)), fam.gens[v].dim, dt / n_sub);
            suffix[v][static_cast<std::size_t>(k)] = suffix[v][static_cast<std::size_t>(k) + 1] * prop.power(n_sub);
        }
    }
    auto final_with = [&](int v, int k, const Eigen::Vector3d& u) {
        const DensityMatrix mid = advance_interval(fam.gens[v], u, prefix[v][static_cast<std::size_t>(k)], dt, n_sub);
        const Eigen::VectorXcd out =
            suffix[v][static_cast<std::size_t>(k)] * Eigen::Map<const Eigen::VectorXcd>(mid.data(), mid.size());
        return hermitize(Eigen::Map<const DensityMatrix>(out.data(), rho0.rows(), rho0.cols()));
    };
    auto objective_with = [&](int k, const Eigen::Vector3d& u) {
        const DensityMatrix base = final_with(0, k, u);
        check_final_state(base, "objective_gradient");
        return qfi_from_central_difference(base, final_with(1, k, u), final_with(2, k, u), fam.step);
    };
    Eigen::MatrixX3d grad(m, 3);
    for (int k = 0; k < m; ++k)
        for (int a = 0; a < 3; ++a) {
            Eigen::Vector3d up = schedule.amplitudes.row(k).transpose();
            Eigen::Vector3d down = up;
            up(a) += grad_step;
            down(a) -= grad_step;
            grad(k, a) = (objective_with(k, up) - objective_with(k, down)) / (2.0 * grad_step);
        }
    return grad;
}

ControlSchedule clamp(ControlSchedule s) {
    if (s.amplitude_bound > 0.0) s.amplitudes = s.amplitudes.cwiseMax(-s.amplitude_bound).cwiseMin(s.amplitude_bound);
    return s;
}

}  // namespace

int control_substeps(const LindbladSpec& spec, const ControlSchedule& schedule) {
    spec.validate();
    schedule.validate();
    return substeps_for(ControlledGenerator(spec), schedule);
}

std::vector<DensityMatrix> evolve_controlled(const LindbladSpec& spec, const ControlSchedule& schedule,
                                             const DensityMatrix& rho0, int substeps) {
    spec.validate();
    schedule.validate();
    if (rho0.rows() != spec.dim() || rho0.cols() != spec.dim())
        throw ContractError("evolve_controlled: rho0 dimension does not match the generator");
    validate_density_matrix(rho0, "evolve_controlled");
    if (substeps < 0) throw ContractError("evolve_controlled: substeps must be >= 0");
    const ControlledGenerator gen(spec);
    return run_schedule(gen, schedule, rho0, substeps > 0 ? substeps : substeps_for(gen, schedule));
}

double objective_qfi(const ControlSchedule& schedule, const ModelSpec& model, const std::string& param,
                     const DensityMatrix& rho0, int substeps, std::optional<double> fd_step) {
    check_inputs(schedule, model, param, rho0, substeps);
    const auto fam = ParameterFamily::make(model, param, fd_step);
    const int n_sub = substeps > 0 ? substeps : substeps_for(fam.gens[0], schedule);
    return family_objective(fam, schedule, rho0, n_sub);
}

Eigen::MatrixX3d objective_gradient(const ControlSchedule& schedule, const ModelSpec& model, const std::string& param,
                                    const DensityMatrix& rho0, double grad_step, int substeps,
                                    std::optional<double> fd_step) {
    check_inputs(schedule, model, param, rho0, substeps);
    if (!(grad_step > 0.0)) throw ContractError("objective_gradient: grad_step must be positive");
    const auto fam = ParameterFamily::make(model, param, fd_step);
    const int n_sub = substeps > 0 ? substeps : substeps_for(fam.gens[0], schedule);
    return family_gradient(fam, schedule, rho0, grad_step, n_sub);
}

OptimizationReport optimize_controls(const ControlSchedule& schedule0, const ModelSpec& model,
                                     const std::string& param, const DensityMatrix& rho0,
                                     const OptimizeOptions& options) {
    check_inputs(schedule0, model, param, rho0, options.substeps);
    if (options.max_iter < 0) throw ContractError("optimize_controls: max_iter must be >= 0");
    if (!(options.grad_step > 0.0)) throw ContractError("optimize_controls: grad_step must be positive");
    if (!(options.learning_rate > 0.0)) throw ContractError("optimize_controls: learning_rate must be positive");
    if (!(options.ftol >= 0.0)) throw ContractError("optimize_controls: ftol must be >= 0");

    const auto fam = ParameterFamily::make(model, param, options.fd_step);
    OptimizationReport report;
    report.final_schedule = schedule0;
    report.substeps = options.substeps > 0 ? options.substeps : substeps_for(fam.gens[0], schedule0);
    const int n_sub = report.substeps;

    double current = 0.0;
    try {
        current = family_objective(fam, schedule0, rho0, n_sub);
    } catch (const Error& e) {
        report.message = std::string("initial objective failed: ") + e.what();
        return report;
    }
    report.objective_trace.push_back(current);
    double rate = options.learning_rate;

    for (int iter = 0; iter < options.max_iter; ++iter) {
        report.iterations = iter + 1;
        Eigen::MatrixX3d grad;
        try {
            grad = family_gradient(fam, report.final_schedule, rho0, options.grad_step, n_sub);
        } catch (const Error& e) {
            report.message = std::string("gradient evaluation failed: ") + e.what();
            return report;
        }
        if (grad.cwiseAbs().maxCoeff() < 1e-10) {
            report.converged = true;
            report.message = "gradient below 1e-10";
            return report;
        }
        bool accepted = false;
        ControlSchedule trial;
        double value = current;
        for (int halvings = 0; halvings < 60; ++halvings, rate *= 0.5) {
            trial = report.final_schedule;
            trial.amplitudes += rate * grad;
            trial = clamp(std::move(trial));
            try {
                value = family_objective(fam, trial, rho0, n_sub);
            } catch (const IntegrationError&) {
                continue;
            } catch (const ContractError&) {
                continue;
            }
            if (value >= current) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            report.converged = true;
            report.message = "line search found no ascent step";
            return report;
        }
        const double change = value - current;
        report.final_schedule = std::move(trial);
        current = value;
        report.objective_trace.push_back(current);
        rate *= 1.5;
        if (std::abs(change) < options.ftol) {
            report.converged = true;
            report.message = "objective change below ftol";
            return report;
        }
    }
    report.message = "reached max_iter";
    return report;
}

}  // namespace nhqfi
