#pragma once

#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "nhqfi/dynamics.hpp"
#include "nhqfi/errors.hpp"
#include "nhqfi/lindblad.hpp"
#include "nhqfi/models.hpp"

namespace nhqfi {

/// Named estimation parameters θ^i.
struct ParamPoint {
    std::vector<std::string> names;
    std::vector<double> values;

    void validate() const;
    bool contains(const std::string& name) const;
    double get(const std::string& name) const;
    ParamPoint with(const std::string& name, double value) const;
};

/// A concrete system plus the choices needed to evolve it.
struct ModelSpec {
    std::variant<TwoLevelParams, YangLeeParams> params;
    GammaPolicy gamma_policy = GammaPolicy::Shift;
    /// Initial pure state; when unset the Schrödinger pipelines start from
    /// |+…+⟩ and the Lindblad pipelines from |0…0⟩.
    std::optional<StateVector> initial_state;

    int n_sites() const;
    Eigen::Index dim() const { return Eigen::Index{1} << n_sites(); }
    /// {s, r} for the two-level model, {lam, kappa} for the Yang-Lee chain.
    ParamPoint parameters() const;
    ModelSpec with_parameter(const std::string& name, double value) const;
    Operator hamiltonian() const;
    LindbladSpec lindblad() const;
    StateVector schrodinger_initial_state() const;
    DensityMatrix lindblad_initial_state() const;
};

enum class MetricKind { FR_pure, FR_biorthogonal, QFI_mixed, CFI };
enum class DynamicsKind { SchrodingerBiorthogonal, Lindblad };

std::string to_string(MetricKind kind);

/// Time series of a metric (g) or an information (F). Pure-state readers use
/// F = 4 g.
struct MetricSeries {
    std::vector<double> times;
    std::vector<double> values;
    MetricKind kind = MetricKind::FR_pure;
    std::string param;

    void validate() const;
};

/// Default central-difference step 1e-5·max(1, |θ|).
double default_fd_step(double theta);

/// ⟨∂ᵢψ|∂ⱼψ⟩ − ⟨ψ|∂ᵢψ⟩⟨∂ⱼψ|ψ⟩ for a unit-norm ψ.
Complex fr_metric_pure(const StateVector& psi, const StateVector& dpsi_i, const StateVector& dpsi_j);

/// ⟨∂ᵢψ̃|∂ⱼψ⟩ − ⟨∂ᵢψ̃|ψ⟩⟨ψ̃|∂ⱼψ⟩ for a pair with ⟨ψ̃|ψ⟩ = 1 (within 1e-8).
Complex fr_metric_biorthogonal(const StateVector& psi, const LeftStateVector& psitilde,
                               const LeftStateVector& dpsitilde_i, const StateVector& dpsi_j);

/// SLD quantum Fisher information 2 Σ |⟨i|∂ρ|j⟩|² / (λᵢ + λⱼ) over pairs with
/// λᵢ + λⱼ > eigen_cutoff.
double qfi_mixed(const DensityMatrix& rho, const Operator& drho, double eigen_cutoff = 1e-12);

/// Classical Fisher information Σ (∂pₓ)²/pₓ of a POVM, outcomes with pₓ ≤ 1e-12 skipped.
double cfi(const DensityMatrix& rho, const Operator& drho, const std::vector<Operator>& povm);

/// Projectors onto the computational basis.
std::vector<Operator> computational_povm(Eigen::Index dim);

/// Central difference (f(θ+h) − f(θ−h)) / 2h. When f returns a state vector
/// each shifted state is first rotated so that its overlap with f(θ) is real
/// positive, which removes the global-phase freedom of the evaluations.
template <class Evaluate>
auto param_derivative(Evaluate&& evaluate, const ParamPoint& point, const std::string& param, double step) {
    using Result = std::decay_t<decltype(evaluate(point))>;
    if (!(step > 0.0)) throw ContractError("param_derivative: step must be positive");
    const double theta = point.get(param);
    Result plus = evaluate(point.with(param, theta + step));
    Result minus = evaluate(point.with(param, theta - step));
    if constexpr (std::is_same_v<Result, StateVector>) {
        const Result base = evaluate(point);
        for (Result* shifted : {&plus, &minus}) {
            const Complex overlap = base.dot(*shifted);
            if (std::abs(overlap) > 1e-12 * base.norm() * shifted->norm())
                *shifted *= std::conj(overlap) / std::abs(overlap);
        }
    }
    return Result((plus - minus) / (2.0 * step));
}

struct MetricOptions {
    std::optional<double> fd_step;  ///< defaults to default_fd_step(θ)
    int substeps = 0;               ///< integrator substeps per grid interval (0 = automatic)
};

/// Metric along a trajectory. SchrodingerBiorthogonal evolves the (ψ, ψ̃)
/// pair and reports Re g from fr_metric_biorthogonal (kind FR_biorthogonal);
/// Lindblad integrates the master equation and reports the SLD QFI of the
/// trace-one state (kind QFI_mixed).
MetricSeries metric_vs_time(const ModelSpec& model, DynamicsKind dynamics, const std::string& param,
                            const TimeGrid& grid, const MetricOptions& options = {});

/// SLD QFI and computational-basis CFI of the trace-one Lindblad state.
struct InformationSeries {
    MetricSeries qfi;
    MetricSeries cfi;
};

InformationSeries lindblad_information(const ModelSpec& model, const std::string& param, const TimeGrid& grid,
                                       const MetricOptions& options = {});

/// QFI from three states ρ(θ), ρ(θ+h), ρ(θ−h).
double qfi_from_central_difference(const DensityMatrix& rho, const DensityMatrix& plus, const DensityMatrix& minus,
                                   double step);

}  // namespace nhqfi
