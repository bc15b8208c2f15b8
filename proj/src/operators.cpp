#include "nhqfi/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "nhqfi/errors.hpp"

namespace nhqfi {

std::vector<double> TimeGrid::times() const {
    std::vector<double> out(static_cast<std::size_t>(n_steps) + 1);
    for (int k = 0; k <= n_steps; ++k) out[static_cast<std::size_t>(k)] = time(k);
    return out;
}

void TimeGrid::validate() const {
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start))
        throw ContractError("time grid requires finite t_end > t_start");
    if (n_steps < 1) throw ContractError("time grid requires n_steps >= 1");
}

void require_square(const Operator& a, const char* what) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        std::ostringstream msg;
        msg << what << ": expected a non-empty square matrix, got " << a.rows() << "x" << a.cols();
        throw ContractError(msg.str());
    }
}

void require_finite(const Operator& a, const char* what) {
    if (!a.allFinite()) throw ContractError(std::string(what) + ": non-finite entries");
}

Operator pauli(Axis axis) {
    Operator m(2, 2);
    switch (axis) {
        case Axis::X: m << 0.0, 1.0, 1.0, 0.0; break;
        case Axis::Y: m << 0.0, -kI, kI, 0.0; break;
        case Axis::Z: m << 1.0, 0.0, 0.0, -1.0; break;
        case Axis::Identity: m << 1.0, 0.0, 0.0, 1.0; break;
    }
    return m;
}

Operator kron(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Operator site_operator(Axis axis, int site, int chain_length) {
    if (chain_length < 1 || chain_length > 16)
        throw IndexError("site_operator: chain length must be in 1..16");
    if (site < 1 || site > chain_length) {
        std::ostringstream msg;
        msg << "site_operator: site " << site << " outside 1.." << chain_length;
        throw IndexError(msg.str());
    }
    Operator out = Operator::Identity(1, 1);
    const Operator id = pauli(Axis::Identity);
    const Operator sigma = pauli(axis);
    for (int j = 1; j <= chain_length; ++j) out = kron(out, j == site ? sigma : id);
    return out;
}

HermitianSplit hermitian_split(const Operator& h) {
    require_square(h, "hermitian_split");
    const Operator adj = h.adjoint();
    return {0.5 * (h + adj), 0.5 * (h - adj)};
}

double hermiticity_defect(const Operator& a) {
    if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Operator& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return hermiticity_defect(a) <= tol * scale;
}

namespace {

// Sort by real part; values whose real parts agree within 1e-12 (relative to
// the spectral scale) are ordered by imaginary part.
std::vector<Eigen::Index> spectral_order(const Eigen::VectorXcd& values) {
    const auto n = values.size();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    double scale = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, std::abs(values(i)));
    const double tie = 1e-12 * scale;
    std::sort(idx.begin(), idx.end(),
              [&](Eigen::Index a, Eigen::Index b) { return values(a).real() < values(b).real(); });
    // Group runs of (near) equal real part and order each run by imaginary part.
    std::size_t start = 0;
    while (start < idx.size()) {
        std::size_t stop = start + 1;
        while (stop < idx.size() &&
               values(idx[stop]).real() - values(idx[stop - 1]).real() <= tie)
            ++stop;
        std::sort(idx.begin() + static_cast<std::ptrdiff_t>(start),
                  idx.begin() + static_cast<std::ptrdiff_t>(stop),
                  [&](Eigen::Index a, Eigen::Index b) { return values(a).imag() < values(b).imag(); });
        start = stop;
    }
    return idx;
}

constexpr double kClusterTolerance = 1e-3;

Eigen::VectorXcd extended_precision_eigenvalues(const Operator& h) {
    using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<50>,
                                               boost::multiprecision::et_off>;
    using Wide = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
    Wide wide(h.rows(), h.cols());
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j) wide(i, j) = std::complex<Real>(Real(h(i, j).real()), Real(h(i, j).imag()));
    Eigen::ComplexEigenSolver<Wide> solver(wide, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw Error("sorted_spectrum: extended-precision eigensolver failed");
    Eigen::VectorXcd out(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const auto& z = solver.eigenvalues()(i);
        out(i) = {static_cast<double>(z.real()), static_cast<double>(z.imag())};
    }
    return out;
}

}  // namespace

double min_eigenvalue_gap(std::span<const Complex> values) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = i + 1; j < values.size(); ++j)
            gap = std::min(gap, std::abs(values[i] - values[j]));
    return gap;
}

std::vector<Complex> sorted_spectrum(const Operator& h) {
    require_square(h, "sorted_spectrum");
    require_finite(h, "sorted_spectrum");
    Eigen::ComplexEigenSolver<Operator> solver(h, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw Error("sorted_spectrum: eigensolver failed");
    Eigen::VectorXcd values = solver.eigenvalues();
    // Clustered eigenvalues may sit on a defective block, where double precision
    // only resolves them to about eps^(1/k); redo those in extended precision.
    const std::span<const Complex> view(values.data(), static_cast<std::size_t>(values.size()));
    if (min_eigenvalue_gap(view) < kClusterTolerance * std::max(1.0, values.cwiseAbs().maxCoeff()))
        values = extended_precision_eigenvalues(h);
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(values.size()));
    for (auto i : spectral_order(values)) out.push_back(values(i));
    return out;
}

BiorthogonalEigensystem biorthogonal_eig(const Operator& h, double tol) {
    require_square(h, "biorthogonal_eig");
    require_finite(h, "biorthogonal_eig");
    Eigen::ComplexEigenSolver<Operator> solver(h);
    if (solver.info() != Eigen::Success) throw Error("biorthogonal_eig: eigensolver failed");

    const Eigen::VectorXcd& values = solver.eigenvalues();
    const auto order = spectral_order(values);
    const auto n = values.size();

    BiorthogonalEigensystem out;
    Operator right(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto src = order[static_cast<std::size_t>(k)];
        out.eigenvalues.push_back(values(src));
        right.col(k) = solver.eigenvectors().col(src).normalized();
    }

    const double gap = min_eigenvalue_gap(out.eigenvalues);
    auto defective = [&](const char* why) {
        std::ostringstream msg;
        msg << "biorthogonal_eig: " << why << " (minimal eigenvalue gap " << gap << ", tol " << tol
            << "); matrix is defective or at an exceptional point";
        return DefectiveMatrixError(msg.str(), gap);
    };
    if (gap <= tol) throw defective("eigenvalues coalesce");

    Eigen::FullPivLU<Operator> lu(right);
    // Coalescing eigenvectors make the right basis singular even when rounding
    // has split the eigenvalues.
    const Eigen::JacobiSVD<Operator> svd(right);
    const auto& sv = svd.singularValues();
    if (!lu.isInvertible() || sv(n - 1) <= tol * sv(0)) throw defective("eigenvectors coalesce");

    const Operator inverse = lu.inverse();
    for (Eigen::Index k = 0; k < n; ++k) {
        out.right.push_back(right.col(k));
        out.left.push_back(inverse.row(k).adjoint());
    }
    return out;
}

Operator principal_sqrt_hermitian(const Operator& a) {
    require_square(a, "principal_sqrt_hermitian");
    require_finite(a, "principal_sqrt_hermitian");
    if (!is_hermitian(a, 1e-10)) {
        std::ostringstream msg;
        msg << "principal_sqrt_hermitian: input is not Hermitian (defect " << hermiticity_defect(a) << ")";
        throw ContractError(msg.str());
    }
    const Operator sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> solver(sym);
    const Eigen::VectorXd& d = solver.eigenvalues();
    const double floor =
        64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, d.cwiseAbs().maxCoeff());
    Eigen::VectorXcd root(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        const double di = std::abs(d(i)) <= floor ? 0.0 : d(i);
        root(i) = std::sqrt(Complex(di, 0.0));
    }
    const Operator& u = solver.eigenvectors();
    return u * root.asDiagonal() * u.adjoint();
}

Operator matrix_exponential(const Operator& a) {
    require_square(a, "matrix_exponential");
    require_finite(a, "matrix_exponential");
    return a.exp();
}

}  // namespace nhqfi
