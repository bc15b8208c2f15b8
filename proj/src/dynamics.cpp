#include "nhqfi/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "nhqfi/errors.hpp"
#include "nhqfi/operators.hpp"
#include "nhqfi/rk4.hpp"

namespace nhqfi {

namespace {

double inf_norm(const Operator& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

std::vector<StateVector> propagate(const Operator& generator, const StateVector& psi0, const TimeGrid& grid,
                                   int substeps, const char* what) {
    require_square(generator, what);
    require_finite(generator, what);
    grid.validate();
    if (psi0.size() != generator.rows()) {
        std::ostringstream msg;
        msg << what << ": state dimension " << psi0.size() << " does not match operator dimension "
            << generator.rows();
        throw ContractError(msg.str());
    }
    if (substeps < 0) throw ContractError(std::string(what) + ": substeps must be >= 0");
    const double dt = grid.step();
    const int n_sub = substeps > 0 ? substeps : auto_substeps(dt, inf_norm(generator));
    const double h = dt / n_sub;
    const Operator minus_i_h = -kI * generator;
    auto rhs = [&](const StateVector& y) -> StateVector { return minus_i_h * y; };

    std::vector<StateVector> out;
    out.reserve(static_cast<std::size_t>(grid.n_steps) + 1);
    out.push_back(psi0);
    StateVector y = psi0;
    for (int k = 0; k < grid.n_steps; ++k) {
        for (int j = 0; j < n_sub; ++j) y = rk4_step(rhs, y, h);
        out.push_back(y);
    }
    return out;
}

}  // namespace

std::vector<StateVector> evolve_right(const Operator& h, const StateVector& psi0, const TimeGrid& grid,
                                      int substeps) {
    return propagate(h, psi0, grid, substeps, "evolve_right");
}

std::vector<LeftStateVector> evolve_left(const Operator& h, const LeftStateVector& psitilde0,
                                         const TimeGrid& grid, int substeps) {
    require_square(h, "evolve_left");
    return propagate(h.adjoint(), psitilde0, grid, substeps, "evolve_left");
}

EvolutionResult evolve_pair(const Operator& h, const StateVector& psi0, const TimeGrid& grid,
                            std::optional<LeftStateVector> psitilde0, int substeps) {
    const auto [right0, left0] = biorthogonal_renormalize(psi0, psitilde0.value_or(psi0));
    EvolutionResult out;
    out.grid = grid;
    out.right_states = evolve_right(h, right0, grid, substeps);
    out.left_states = evolve_left(h, left0, grid, substeps);
    out.norm_factor.reserve(out.right_states.size());
    for (const auto& psi : out.right_states) out.norm_factor.push_back(psi.norm());
    return out;
}

ClosedFormState closed_form_two_level(const TwoLevelParams& p, double t) {
    const double disc = p.s * p.s - p.r * p.r;
    if (!(disc > 0.0)) {
        std::ostringstream msg;
        msg << "closed_form_two_level: requires s^2 > r^2 (unbroken phase), got s=" << p.s << " r=" << p.r;
        throw PhaseDomainError(msg.str());
    }
    const double e = std::sqrt(disc);
    const double a = e * std::cos(e * t);
    const double b = std::sin(e * t);
    const double norm = std::sqrt(p.s * p.s - p.r * p.r * std::cos(2.0 * e * t));
    const Complex is_plus_r(p.r, p.s);    // is + r
    const Complex is_minus_r(-p.r, p.s);  // is − r

    ClosedFormState out;
    out.norm = norm;
    out.right.resize(2);
    out.right << a - is_plus_r * b, a - is_minus_r * b;
    out.right /= std::sqrt(2.0) * norm;
    out.left.resize(2);
    out.left << a - is_minus_r * b, a - is_plus_r * b;
    out.left *= norm / (std::sqrt(2.0) * e * e);
    return out;
}

std::pair<StateVector, LeftStateVector> biorthogonal_renormalize(const StateVector& psi,
                                                                 const LeftStateVector& psitilde) {
    if (psi.size() != psitilde.size())
        throw ContractError("biorthogonal_renormalize: dimension mismatch");
    const Complex overlap = psitilde.dot(psi);
    if (!(std::abs(overlap) >= 1e-14)) {
        std::ostringstream msg;
        msg << "biorthogonal_renormalize: <psitilde|psi> = " << overlap
            << " vanishes (self-orthogonal state, exceptional point?)";
        throw SelfOrthogonalError(msg.str(), std::abs(overlap));
    }
    const Complex root = std::sqrt(overlap);
    return {psi / root, psitilde / std::conj(root)};
}

Eigen::Index phase_reference_index(const StateVector& v) {
    const double threshold = 1e-12 * v.norm();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > threshold) return i;
    return 0;
}

Complex phase_alignment_factor(const StateVector& v, Eigen::Index ref) {
    const Complex c = v(ref);
    if (std::abs(c) == 0.0) return 1.0;
    return std::conj(c) / std::abs(c);
}

StateVector align_global_phase(const StateVector& v) {
    if (v.size() == 0) return v;
    return v * phase_alignment_factor(v, phase_reference_index(v));
}

std::pair<StateVector, LeftStateVector> canonical_biorthogonal_gauge(const StateVector& psi,
                                                                     const LeftStateVector& psitilde) {
    const double n = psi.norm();
    if (n == 0.0) throw ContractError("canonical_biorthogonal_gauge: zero right state");
    const Complex phase = phase_alignment_factor(psi, phase_reference_index(psi));
    // ψ → c ψ requires ψ̃ → ψ̃ / conj(c) to keep ⟨ψ̃|ψ⟩.
    const Complex c = phase / n;
    return {psi * c, psitilde / std::conj(c)};
}

StateVector plus_state(int n_sites) {
    if (n_sites < 1 || n_sites > 16) throw ContractError("plus_state: n_sites must be in 1..16");
    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    return StateVector::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
}

StateVector zero_state(int n_sites) {
    if (n_sites < 1 || n_sites > 16) throw ContractError("zero_state: n_sites must be in 1..16");
    StateVector v = StateVector::Zero(Eigen::Index{1} << n_sites);
    v(0) = 1.0;
    return v;
}

}  // namespace nhqfi
