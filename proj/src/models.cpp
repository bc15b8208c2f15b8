#include "nhqfi/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "nhqfi/errors.hpp"
#include "nhqfi/operators.hpp"

namespace nhqfi {

void YangLeeParams::validate() const {
    if (n_sites < 1 || n_sites > 8) throw ContractError("yang-lee: n_sites must be in 1..8");
    if (!periodic) throw ContractError("yang-lee: only periodic boundary conditions are supported");
    if (!std::isfinite(lam) || !std::isfinite(kappa)) throw ContractError("yang-lee: non-finite parameter");
}

std::string to_string(Phase phase) {
    switch (phase) {
        case Phase::Unbroken: return "Unbroken";
        case Phase::ExceptionalPoint: return "ExceptionalPoint";
        case Phase::Broken: return "Broken";
    }
    return "?";
}

Operator build_two_level(const TwoLevelParams& p) {
    return p.s * pauli(Axis::X) - kI * p.r * pauli(Axis::Z);
}

std::pair<Complex, Complex> two_level_eigenvalues(const TwoLevelParams& p) {
    const Complex w = std::sqrt(Complex(p.s * p.s - p.r * p.r, 0.0));
    return {w, -w};
}

std::pair<StateVector, StateVector> two_level_eigenstates(const TwoLevelParams& p) {
    const double disc = p.s * p.s - p.r * p.r;
    if (!(disc > 0.0)) {
        std::ostringstream msg;
        msg << "two_level_eigenstates: requires s^2 > r^2 (unbroken phase), got s=" << p.s << " r=" << p.r;
        throw PhaseDomainError(msg.str());
    }
    const double w = std::sqrt(disc);
    // Lower component (ir ± w)/s; real positive n_± with ⟨E_±|PT|E_±⟩ = ±1,
    // which gives |n_±|² = s/(2w) and the printed 1/(2w) at s = 1.
    const double n = std::sqrt(p.s / (2.0 * w));
    StateVector plus(2), minus(2);
    plus << n, n * (kI * p.r + w) / p.s;
    minus << n, n * (kI * p.r - w) / p.s;
    return {plus, minus};
}

Complex pt_inner_product(const StateVector& a, const StateVector& b) {
    if (a.size() != 2 || b.size() != 2) throw ContractError("pt_inner_product: states must be 2-dimensional");
    // (PT a)^T b, which equals a† σ^x b.
    const StateVector pt_a = pauli(Axis::X) * a.conjugate();
    return pt_a.cwiseProduct(b).sum();
}

YangLeeSplit yang_lee_split(const YangLeeParams& p) {
    p.validate();
    const int n = p.n_sites;
    const Eigen::Index dim = Eigen::Index{1} << n;
    YangLeeSplit out{Operator::Zero(dim, dim), Operator::Zero(dim, dim)};
    for (int j = 1; j <= n; ++j) {
        const int next = j % n + 1;  // periodic wrap, σ_{N+1} = σ_1
        const Operator sx = site_operator(Axis::X, j, n);
        out.h0 -= 0.5 * (site_operator(Axis::Z, j, n) + p.lam * sx * site_operator(Axis::X, next, n));
        out.h1 += 0.5 * p.kappa * sx;
    }
    return out;
}

Operator build_yang_lee(const YangLeeParams& p) {
    p.validate();
    const int n = p.n_sites;
    const Eigen::Index dim = Eigen::Index{1} << n;
    Operator h = Operator::Zero(dim, dim);
    for (int j = 1; j <= n; ++j) {
        const int next = j % n + 1;
        const Operator sx = site_operator(Axis::X, j, n);
        h -= 0.5 * (site_operator(Axis::Z, j, n) + p.lam * sx * site_operator(Axis::X, next, n) +
                    kI * p.kappa * sx);
    }
    return h;
}

namespace {

// True when some cluster of eigenvalues closer than tol has fewer independent
// eigenvectors than members.
bool has_defective_cluster(const Operator& h, const std::vector<Complex>& spectrum, double tol) {
    const double scale = std::max(1.0, h.cwiseAbs().rowwise().sum().maxCoeff());
    std::vector<bool> used(spectrum.size(), false);
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (used[i]) continue;
        std::vector<std::size_t> cluster{i};
        for (std::size_t j = i + 1; j < spectrum.size(); ++j)
            if (!used[j] && std::abs(spectrum[j] - spectrum[i]) <= tol) cluster.push_back(j);
        if (cluster.size() < 2) continue;
        Complex centre = 0.0;
        for (auto j : cluster) {
            used[j] = true;
            centre += spectrum[j];
        }
        centre /= static_cast<double>(cluster.size());
        const Operator shifted = h - centre * Operator::Identity(h.rows(), h.cols());
        const Eigen::VectorXd sv = Eigen::JacobiSVD<Operator>(shifted).singularValues();
        const auto kernel = (sv.array() <= 1e-7 * scale).count();
        if (static_cast<std::size_t>(kernel) < cluster.size()) return true;
    }
    return false;
}

PhaseLabel label_from_spectrum(const Operator& h, const std::vector<Complex>& spectrum, double tol) {
    PhaseLabel out;
    for (const auto& e : spectrum) out.max_abs_im = std::max(out.max_abs_im, std::abs(e.imag()));
    out.min_gap = min_eigenvalue_gap(spectrum);
    if (out.min_gap <= tol && has_defective_cluster(h, spectrum, tol))
        out.label = Phase::ExceptionalPoint;
    else if (out.max_abs_im > tol)
        out.label = Phase::Broken;
    else
        out.label = Phase::Unbroken;
    return out;
}

}  // namespace

PhaseLabel classify_phase(const Operator& h, double tol) {
    require_square(h, "classify_phase");
    return label_from_spectrum(h, sorted_spectrum(h), tol);
}

std::vector<PhasePoint> phase_scan_two_level(double s, const std::vector<double>& ratios, double tol) {
    if (ratios.empty()) throw ContractError("phase_scan: empty grid");
    std::vector<PhasePoint> out;
    out.reserve(ratios.size());
    for (double ratio : ratios) {
        const auto [ep, em] = two_level_eigenvalues({s, ratio * s});
        out.push_back({{ratio}, label_from_spectrum(build_two_level({s, ratio * s}), {ep, em}, tol)});
    }
    return out;
}

std::vector<PhasePoint> phase_scan_yang_lee(int n_sites, const std::vector<std::pair<double, double>>& grid,
                                            double tol) {
    if (grid.empty()) throw ContractError("phase_scan: empty grid");
    std::vector<PhasePoint> out;
    out.reserve(grid.size());
    for (const auto& [lam, kappa] : grid) {
        const Operator h = build_yang_lee({lam, kappa, n_sites, true});
        out.push_back({{lam, kappa}, classify_phase(h, tol)});
    }
    return out;
}

}  // namespace nhqfi
