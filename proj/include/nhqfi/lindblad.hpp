#pragma once

#include <vector>

#include "nhqfi/types.hpp"

namespace nhqfi {

/// How Γ = √(2 H₁) is realized when H₁ is indefinite.
enum class GammaPolicy {
    Strict,  ///< principal root of 2H₁ itself (complex, non-Hermitian when H₁ is indefinite)
    Shift,   ///< root of 2(H₁ + c·1), c = max(0, −λ_min(H₁)); Hermitian PSD
};

struct LindbladSpec {
    Operator h_plus;                ///< Hermitian part driving −i[H₊, ρ]
    std::vector<Operator> jump_ops;  ///< dissipation operators Γ

    void validate() const;
    Eigen::Index dim() const { return h_plus.rows(); }
};

Operator gamma_from_h1(const Operator& h1, GammaPolicy policy);

/// Lindblad data for a non-Hermitian H: H₊ = ½(H + H†) and a single Γ built
/// from H₁ = i·H₋ (so that H = H₊ − i H₁).
LindbladSpec lindblad_spec_from_hamiltonian(const Operator& h, GammaPolicy policy);

/// Γ ρ Γ† − ½ (Γ†Γ ρ + ρ Γ†Γ).
DensityMatrix dissipator(const Operator& gamma, const DensityMatrix& rho);

/// Right-hand side −i[H₊, ρ] + Σ 𝒟[Γ]ρ.
DensityMatrix master_rhs(const LindbladSpec& spec, const DensityMatrix& rho);

/// Column-stacked superoperator L with vec(dρ/dt) = L vec(ρ).
Operator liouvillian(const LindbladSpec& spec);

/// Explicit-Euler update ρ + τ(−i[H₊, ρ] + 𝒟[Γ]ρ).
DensityMatrix lindblad_step(const LindbladSpec& spec, const DensityMatrix& rho, double tau);

/// Fixed-step RK4 propagator for a constant Liouvillian. One step is the RK4
/// stage combination applied to the linear generator, i.e. the matrix
/// 1 + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24 acting on vec(ρ).
class MasterPropagator {
public:
    MasterPropagator(const LindbladSpec& spec, double step);
    MasterPropagator(const Operator& liouvillian, Eigen::Index dim, double step);

    /// Applies `n` RK4 steps.
    DensityMatrix advance(const DensityMatrix& rho, int n) const;
    /// Matrix of `n` steps, step^n.
    Operator power(int n) const;
    const Operator& step_matrix() const { return step_; }
    Eigen::Index dim() const { return dim_; }

private:
    Eigen::Index dim_;
    Operator step_;
};

/// Substeps per interval `dt` such that h·‖L‖∞ ≤ 0.01.
int master_substeps(const Operator& liouvillian, double dt);

/// Throws ContractError unless rho is a Hermitian, unit-trace, PSD matrix
/// (tolerances 1e-8).
void validate_density_matrix(const DensityMatrix& rho, const char* what);

/// (ρ + ρ†)/2.
DensityMatrix hermitize(const DensityMatrix& rho);

/// RK4 integration of the master equation, stored at every grid time and
/// re-symmetrized after each interval. Throws IntegrationError if the trace
/// drifts by more than 1e-6 or the spectrum dips below −1e-8.
std::vector<DensityMatrix> integrate_master(const LindbladSpec& spec, const DensityMatrix& rho0,
                                            const TimeGrid& grid, int substeps = 0);

/// Jump-free evolution dρ/dt = −i[H₊, ρ] + i{H₋, ρ}. The trace is not
/// conserved; with `renormalize` each stored state is divided by its trace.
/// Throws DecayUnderflowError when the trace falls below 1e-12.
std::vector<DensityMatrix> no_jump_evolution(const Operator& h, const DensityMatrix& rho0, const TimeGrid& grid,
                                             bool renormalize, int substeps = 0);

}  // namespace nhqfi
