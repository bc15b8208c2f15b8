#pragma once

#include <span>
#include <vector>

#include "nhqfi/types.hpp"

namespace nhqfi {

enum class Axis { X, Y, Z, Identity };

/// Standard 2x2 Pauli matrix (or the 2x2 identity).
Operator pauli(Axis axis);

/// 2^N-dimensional embedding 1 ⊗ … ⊗ σ ⊗ … ⊗ 1 with σ on `site` (1-based).
/// Site 1 is the leftmost, most significant tensor factor.
Operator site_operator(Axis axis, int site, int chain_length);

Operator kron(const Operator& a, const Operator& b);

struct HermitianSplit {
    Operator plus;   ///< ½(H + H†), Hermitian
    Operator minus;  ///< ½(H − H†), anti-Hermitian
};

HermitianSplit hermitian_split(const Operator& h);

/// Largest entry of |A − A†|.
double hermiticity_defect(const Operator& a);

/// Hermitian within `tol`, measured relative to max(1, max|A_ij|).
bool is_hermitian(const Operator& a, double tol = 1e-10);

/// Right/left eigenpairs with ⟨left_n|right_m⟩ = δ_nm. Right vectors keep unit
/// norm; only the left vectors carry the biorthogonal rescaling.
struct BiorthogonalEigensystem {
    std::vector<StateVector> right;
    std::vector<LeftStateVector> left;
    std::vector<Complex> eigenvalues;
};

/// Eigenvalues are ordered by real part, ties (within 1e-12) by imaginary part.
/// Throws DefectiveMatrixError when two eigenvalues lie within `tol` of each
/// other or the eigenvector matrix is numerically singular.
BiorthogonalEigensystem biorthogonal_eig(const Operator& h, double tol = 1e-9);

/// Full spectrum in the same order as biorthogonal_eig, without the basis.
std::vector<Complex> sorted_spectrum(const Operator& h);

/// Smallest |λ_i − λ_j| over distinct indices; +inf for fewer than two values.
double min_eigenvalue_gap(std::span<const Complex> values);

/// Spectral square root U·diag(√d)·U† with the principal complex branch, so a
/// negative eigenvalue maps to a positive-imaginary root. Eigenvalues within
/// roundoff of zero are treated as zero.
Operator principal_sqrt_hermitian(const Operator& a);

/// exp(A) by scaling and squaring.
Operator matrix_exponential(const Operator& a);

void require_square(const Operator& a, const char* what);
void require_finite(const Operator& a, const char* what);

}  // namespace nhqfi
