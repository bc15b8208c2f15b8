#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nhqfi/types.hpp"

namespace nhqfi {

/// H = s σ^x − i r σ^z.
struct TwoLevelParams {
    double s = 1.0;  ///< σ^x coupling
    double r = 0.0;  ///< strength of the imaginary σ^z field
};

/// Periodic Ising chain with an imaginary transverse field,
/// H = −½ Σ_j (σ^z_j + λ σ^x_j σ^x_{j+1} + i κ σ^x_j), σ_{N+1} = σ_1.
struct YangLeeParams {
    double lam = 1.0;
    double kappa = 0.0;
    int n_sites = 1;
    bool periodic = true;

    void validate() const;
};

enum class Phase { Unbroken, ExceptionalPoint, Broken };

struct PhaseLabel {
    Phase label = Phase::Unbroken;
    double max_abs_im = 0.0;  ///< largest |Im E|
    double min_gap = 0.0;     ///< smallest eigenvalue separation
};

std::string to_string(Phase phase);

Operator build_two_level(const TwoLevelParams& p);

/// (E₊, E₋) = (+w, −w), w = √(s² − r²) on the principal branch.
std::pair<Complex, Complex> two_level_eigenvalues(const TwoLevelParams& p);

/// |E_±⟩ = n_± (1, i r ± √(s² − r²)) with real positive n_±, |n_±|² = 1/(2√(s² − r²)).
/// Only defined in the unbroken phase; throws PhaseDomainError otherwise.
std::pair<StateVector, StateVector> two_level_eigenstates(const TwoLevelParams& p);

/// PT inner product (PT a)^T b with P = σ^x and T = complex conjugation.
/// The unbroken eigenstates satisfy ⟨E_±|PT|E_±⟩ = ±1 and ⟨E_±|PT|E_∓⟩ = 0.
Complex pt_inner_product(const StateVector& a, const StateVector& b);

Operator build_yang_lee(const YangLeeParams& p);

struct YangLeeSplit {
    Operator h0;  ///< −½ Σ (σ^z_j + λ σ^x_j σ^x_{j+1})
    Operator h1;  ///< ½ κ Σ σ^x_j
};

/// H = H0 − i·H1 with both parts Hermitian.
YangLeeSplit yang_lee_split(const YangLeeParams& p);

/// ExceptionalPoint when eigenvalues within `tol` of each other share fewer
/// eigenvectors than their count (a defective block), Broken when some |Im E|
/// exceeds `tol`, Unbroken otherwise. Symmetry degeneracies are not EPs.
PhaseLabel classify_phase(const Operator& h, double tol = 1e-9);

struct PhasePoint {
    std::vector<double> point;  ///< (r/s) for the two-level family, (λ, κ) for Yang-Lee
    PhaseLabel phase;
};

/// Two-level scan over ratios r/s at fixed s. Uses the closed-form spectrum,
/// so the coalescence at r/s = 1 is exact.
std::vector<PhasePoint> phase_scan_two_level(double s, const std::vector<double>& ratios,
                                             double tol = 1e-9);

/// Yang-Lee scan over (λ, κ) pairs at fixed chain length.
std::vector<PhasePoint> phase_scan_yang_lee(int n_sites,
                                            const std::vector<std::pair<double, double>>& grid,
                                            double tol = 1e-9);

}  // namespace nhqfi
