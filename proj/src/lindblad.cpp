#include "nhqfi/lindblad.hpp"

#include <cmath>
#include <sstream>

#include "nhqfi/errors.hpp"
#include "nhqfi/operators.hpp"
#include "nhqfi/rk4.hpp"

namespace nhqfi {

namespace {

double inf_norm(const Operator& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream msg;
        msg << what << ": dimension mismatch (" << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
            << b.cols() << ")";
        throw ContractError(msg.str());
    }
}

Eigen::VectorXcd vec(const DensityMatrix& rho) {
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

DensityMatrix unvec(const Eigen::VectorXcd& v, Eigen::Index dim) {
    return Eigen::Map<const DensityMatrix>(v.data(), dim, dim);
}

}  // namespace

void LindbladSpec::validate() const {
    require_square(h_plus, "LindbladSpec.h_plus");
    if (!is_hermitian(h_plus, 1e-10)) throw ContractError("LindbladSpec: h_plus is not Hermitian");
    for (const auto& g : jump_ops) require_same_dim(h_plus, g, "LindbladSpec.jump_ops");
}

Operator gamma_from_h1(const Operator& h1, GammaPolicy policy) {
    require_square(h1, "gamma_from_h1");
    if (!is_hermitian(h1, 1e-10)) throw ContractError("gamma_from_h1: H1 is not Hermitian");
    Operator target = 2.0 * h1;
    if (policy == GammaPolicy::Shift) {
        const Operator sym = 0.5 * (h1 + h1.adjoint());
        const double lowest = Eigen::SelfAdjointEigenSolver<Operator>(sym, Eigen::EigenvaluesOnly)
                                  .eigenvalues()
                                  .minCoeff();
        const double c = std::max(0.0, -lowest);
        target += 2.0 * c * Operator::Identity(h1.rows(), h1.cols());
    }
    return principal_sqrt_hermitian(target);
}

LindbladSpec lindblad_spec_from_hamiltonian(const Operator& h, GammaPolicy policy) {
    const auto split = hermitian_split(h);
    const Operator h1 = kI * split.minus;
    return {split.plus, {gamma_from_h1(0.5 * (h1 + h1.adjoint()), policy)}};
}

DensityMatrix dissipator(const Operator& gamma, const DensityMatrix& rho) {
    require_square(gamma, "dissipator");
    require_same_dim(gamma, rho, "dissipator");
    const Operator gdg = gamma.adjoint() * gamma;
    return gamma * rho * gamma.adjoint() - 0.5 * (gdg * rho + rho * gdg);
}

DensityMatrix master_rhs(const LindbladSpec& spec, const DensityMatrix& rho) {
    require_same_dim(spec.h_plus, rho, "master_rhs");
    DensityMatrix out = -kI * (spec.h_plus * rho - rho * spec.h_plus);
    for (const auto& g : spec.jump_ops) out += dissipator(g, rho);
    return out;
}

Operator liouvillian(const LindbladSpec& spec) {
    const Eigen::Index d = spec.dim();
    const Operator id = Operator::Identity(d, d);
    Operator l = -kI * (kron(id, spec.h_plus) - kron(spec.h_plus.transpose(), id));
    for (const auto& g : spec.jump_ops) {
        const Operator gdg = g.adjoint() * g;
        l += kron(g.conjugate(), g) - 0.5 * kron(id, gdg) - 0.5 * kron(gdg.transpose(), id);
    }
    return l;
}

DensityMatrix lindblad_step(const LindbladSpec& spec, const DensityMatrix& rho, double tau) {
    if (!(tau > 0.0)) throw ContractError("lindblad_step: tau must be positive");
    return rho + tau * master_rhs(spec, rho);
}

MasterPropagator::MasterPropagator(const LindbladSpec& spec, double step)
    : MasterPropagator(liouvillian(spec), spec.dim(), step) {}

MasterPropagator::MasterPropagator(const Operator& l, Eigen::Index dim, double step) : dim_(dim) {
    if (l.rows() != dim * dim || l.cols() != dim * dim)
        throw ContractError("MasterPropagator: Liouvillian has the wrong shape");
    const Operator hl = step * l;
    const Operator id = Operator::Identity(l.rows(), l.cols());
    // Horner form of the degree-4 Taylor polynomial.
    step_ = id + hl * (id + hl * (0.5 * id + hl * (id / 6.0 + hl / 24.0)));
}

DensityMatrix MasterPropagator::advance(const DensityMatrix& rho, int n) const {
    Eigen::VectorXcd v = vec(rho);
    for (int k = 0; k < n; ++k) v = step_ * v;
    return unvec(v, dim_);
}

Operator MasterPropagator::power(int n) const {
    Operator result = Operator::Identity(step_.rows(), step_.cols());
    Operator base = step_;
    while (n > 0) {
        if (n & 1) result = base * result;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

int master_substeps(const Operator& l, double dt) { return auto_substeps(dt, inf_norm(l)); }

DensityMatrix hermitize(const DensityMatrix& rho) { return 0.5 * (rho + rho.adjoint()); }

void validate_density_matrix(const DensityMatrix& rho, const char* what) {
    require_square(rho, what);
    require_finite(rho, what);
    if (hermiticity_defect(rho) > 1e-8) throw ContractError(std::string(what) + ": density matrix is not Hermitian");
    const Complex tr = rho.trace();
    if (std::abs(tr - 1.0) > 1e-8) {
        std::ostringstream msg;
        msg << what << ": density matrix trace " << tr << " is not 1";
        throw ContractError(msg.str());
    }
    const double lowest =
        Eigen::SelfAdjointEigenSolver<Operator>(hermitize(rho), Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    if (lowest < -1e-8) {
        std::ostringstream msg;
        msg << what << ": density matrix has negative eigenvalue " << lowest;
        throw ContractError(msg.str());
    }
}

std::vector<DensityMatrix> integrate_master(const LindbladSpec& spec, const DensityMatrix& rho0,
                                            const TimeGrid& grid, int substeps) {
    spec.validate();
    grid.validate();
    require_same_dim(spec.h_plus, rho0, "integrate_master");
    validate_density_matrix(rho0, "integrate_master");
    if (substeps < 0) throw ContractError("integrate_master: substeps must be >= 0");

    const Operator l = liouvillian(spec);
    const double dt = grid.step();
    const int n_sub = substeps > 0 ? substeps : master_substeps(l, dt);
    const MasterPropagator prop(l, spec.dim(), dt / n_sub);

    std::vector<DensityMatrix> out;
    out.reserve(static_cast<std::size_t>(grid.n_steps) + 1);
    out.push_back(hermitize(rho0));
    const Complex trace0 = out.front().trace();
    for (int k = 0; k < grid.n_steps; ++k) {
        DensityMatrix next = hermitize(prop.advance(out.back(), n_sub));
        const double drift = std::abs(next.trace() - trace0);
        if (drift > 1e-6) {
            std::ostringstream msg;
            msg << "integrate_master: trace drift " << drift << " at t=" << grid.time(k + 1)
                << " exceeds 1e-6; reduce the step (substeps=" << n_sub << ")";
            throw IntegrationError(msg.str());
        }
        const double lowest =
            Eigen::SelfAdjointEigenSolver<Operator>(next, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
        if (lowest < -1e-8) {
            std::ostringstream msg;
            msg << "integrate_master: eigenvalue " << lowest << " < -1e-8 at t=" << grid.time(k + 1)
                << " (substeps=" << n_sub << ")";
            throw IntegrationError(msg.str());
        }
        out.push_back(std::move(next));
    }
    return out;
}

std::vector<DensityMatrix> no_jump_evolution(const Operator& h, const DensityMatrix& rho0, const TimeGrid& grid,
                                             bool renormalize, int substeps) {
    require_square(h, "no_jump_evolution");
    require_same_dim(h, rho0, "no_jump_evolution");
    grid.validate();
    validate_density_matrix(rho0, "no_jump_evolution");
    if (substeps < 0) throw ContractError("no_jump_evolution: substeps must be >= 0");

    const auto split = hermitian_split(h);
    auto rhs = [&](const DensityMatrix& rho) -> DensityMatrix {
        return -kI * (split.plus * rho - rho * split.plus) + kI * (split.minus * rho + rho * split.minus);
    };
    const double dt = grid.step();
    const int n_sub = substeps > 0 ? substeps : auto_substeps(dt, 2.0 * inf_norm(h));
    const double step = dt / n_sub;

    std::vector<DensityMatrix> out;
    out.reserve(static_cast<std::size_t>(grid.n_steps) + 1);
    out.push_back(rho0);
    DensityMatrix rho = rho0;
    for (int k = 0; k < grid.n_steps; ++k) {
        for (int j = 0; j < n_sub; ++j) rho = rk4_step(rhs, rho, step);
        rho = hermitize(rho);
        const double tr = rho.trace().real();
        if (!(tr >= 1e-12)) {
            std::ostringstream msg;
            msg << "no_jump_evolution: trace " << tr << " fell below 1e-12 at t=" << grid.time(k + 1);
            throw DecayUnderflowError(msg.str());
        }
        out.push_back(renormalize ? DensityMatrix(rho / tr) : rho);
    }
    return out;
}

}  // namespace nhqfi
