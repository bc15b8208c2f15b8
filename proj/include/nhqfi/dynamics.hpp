#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nhqfi/models.hpp"
#include "nhqfi/types.hpp"

namespace nhqfi {

/// Trajectories of i∂ψ = Hψ and i∂ψ̃ = H†ψ̃ stored on a grid.
struct EvolutionResult {
    TimeGrid grid;
    std::vector<StateVector> right_states;
    std::vector<LeftStateVector> left_states;
    std::vector<double> norm_factor;  ///< conventional norm ‖ψ(t_k)‖ of the right state
};

/// Fixed-step RK4 solution of i∂ψ = Hψ sampled at every grid time (no
/// renormalization). `substeps` = 0 picks the count per interval so that
/// step·‖H‖∞ ≤ 0.01.
std::vector<StateVector> evolve_right(const Operator& h, const StateVector& psi0, const TimeGrid& grid,
                                      int substeps = 0);

/// Same as evolve_right with H replaced by H†.
std::vector<LeftStateVector> evolve_left(const Operator& h, const LeftStateVector& psitilde0,
                                         const TimeGrid& grid, int substeps = 0);

/// Paired evolution. The left initial state defaults to the right one; the
/// initial pair is biorthogonally renormalized before propagation.
EvolutionResult evolve_pair(const Operator& h, const StateVector& psi0, const TimeGrid& grid,
                            std::optional<LeftStateVector> psitilde0 = std::nullopt, int substeps = 0);

struct ClosedFormState {
    StateVector right;     ///< unit conventional norm
    LeftStateVector left;  ///< biorthogonal dual, ⟨left|right⟩ = 1
    double norm;           ///< 𝒩 = √(s² − r² cos(2√(s² − r²) t))
};

/// Closed-form solution for the two-level model started from (|0⟩+|1⟩)/√2,
/// unbroken phase only (PhaseDomainError otherwise). With E = √(s² − r²):
///   ψ(t)  = (E cos Et − (is + r) sin Et, E cos Et − (is − r) sin Et) / (√2 𝒩)
///   ψ̃(t) = (E cos Et − (is − r) sin Et, E cos Et − (is + r) sin Et) · 𝒩 / (√2 E²)
/// so that ψ̃'s bra components are (E cos Et + (is + r) sin Et, …) up to scale.
ClosedFormState closed_form_two_level(const TwoLevelParams& p, double t);

/// Rescales the pair so that ⟨ψ̃|ψ⟩ = 1: ψ → ψ/√p and ψ̃ → ψ̃/conj(√p) with
/// p = ⟨ψ̃|ψ⟩ on the principal branch. Throws SelfOrthogonalError if |p| < 1e-14.
std::pair<StateVector, LeftStateVector> biorthogonal_renormalize(const StateVector& psi,
                                                                 const LeftStateVector& psitilde);

/// Index of the first component with modulus above 1e-12·‖v‖ (0 for the zero vector).
Eigen::Index phase_reference_index(const StateVector& v);

/// Unit phase e^{-i arg v_ref}, which makes component `ref` real positive.
Complex phase_alignment_factor(const StateVector& v, Eigen::Index ref);

/// Multiplies by the phase that makes the first nonzero component real positive.
StateVector align_global_phase(const StateVector& v);

/// Gauge used to compare trajectories: right state scaled to unit norm with its
/// first nonzero component real positive; the left state takes the inverse
/// scaling so ⟨left|right⟩ is unchanged.
std::pair<StateVector, LeftStateVector> canonical_biorthogonal_gauge(const StateVector& psi,
                                                                     const LeftStateVector& psitilde);

/// (|0⟩ + |1⟩)/√2 on every site.
StateVector plus_state(int n_sites);
/// |0…0⟩.
StateVector zero_state(int n_sites);

}  // namespace nhqfi
