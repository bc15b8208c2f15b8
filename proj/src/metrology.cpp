#include "nhqfi/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nhqfi/operators.hpp"
#include "nhqfi/rk4.hpp"

namespace nhqfi {

void ParamPoint::validate() const {
    if (names.size() != values.size()) throw ContractError("ParamPoint: names and values differ in length");
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j)
            if (names[i] == names[j]) throw ContractError("ParamPoint: duplicate parameter '" + names[i] + "'");
}

bool ParamPoint::contains(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

double ParamPoint::get(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw ContractError("unknown parameter '" + name + "'");
    return values[static_cast<std::size_t>(it - names.begin())];
}

ParamPoint ParamPoint::with(const std::string& name, double value) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw ContractError("unknown parameter '" + name + "'");
    ParamPoint out = *this;
    out.values[static_cast<std::size_t>(it - names.begin())] = value;
    return out;
}

int ModelSpec::n_sites() const {
    if (const auto* yl = std::get_if<YangLeeParams>(&params)) return yl->n_sites;
    return 1;
}

ParamPoint ModelSpec::parameters() const {
    if (const auto* tl = std::get_if<TwoLevelParams>(&params)) return {{"s", "r"}, {tl->s, tl->r}};
    const auto& yl = std::get<YangLeeParams>(params);
    return {{"lam", "kappa"}, {yl.lam, yl.kappa}};
}

ModelSpec ModelSpec::with_parameter(const std::string& name, double value) const {
    ModelSpec out = *this;
    if (auto* tl = std::get_if<TwoLevelParams>(&out.params)) {
        if (name == "s")
            tl->s = value;
        else if (name == "r")
            tl->r = value;
        else
            throw ContractError("two-level model has no parameter '" + name + "' (expected s or r)");
    } else {
        auto& yl = std::get<YangLeeParams>(out.params);
        if (name == "lam")
            yl.lam = value;
        else if (name == "kappa")
            yl.kappa = value;
        else
            throw ContractError("yang-lee model has no parameter '" + name + "' (expected lam or kappa)");
    }
    return out;
}

Operator ModelSpec::hamiltonian() const {
    if (const auto* tl = std::get_if<TwoLevelParams>(&params)) return build_two_level(*tl);
    return build_yang_lee(std::get<YangLeeParams>(params));
}

LindbladSpec ModelSpec::lindblad() const {
    if (const auto* yl = std::get_if<YangLeeParams>(&params)) {
        const auto split = yang_lee_split(*yl);
        return {split.h0, {gamma_from_h1(split.h1, gamma_policy)}};
    }
    return lindblad_spec_from_hamiltonian(hamiltonian(), gamma_policy);
}

namespace {

StateVector checked_initial(const std::optional<StateVector>& psi, Eigen::Index dim, StateVector fallback) {
    if (!psi) return fallback;
    if (psi->size() != dim) {
        std::ostringstream msg;
        msg << "initial state has dimension " << psi->size() << ", model needs " << dim;
        throw ContractError(msg.str());
    }
    const double n = psi->norm();
    if (!(n > 0.0)) throw ContractError("initial state is zero");
    return *psi / n;
}

}  // namespace

StateVector ModelSpec::schrodinger_initial_state() const {
    return checked_initial(initial_state, dim(), plus_state(n_sites()));
}

DensityMatrix ModelSpec::lindblad_initial_state() const {
    const StateVector psi = checked_initial(initial_state, dim(), zero_state(n_sites()));
    return psi * psi.adjoint();
}

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::FR_pure: return "FR_pure";
        case MetricKind::FR_biorthogonal: return "FR_biorthogonal";
        case MetricKind::QFI_mixed: return "QFI_mixed";
        case MetricKind::CFI: return "CFI";
    }
    return "?";
}

void MetricSeries::validate() const {
    if (times.size() != values.size()) throw ContractError("MetricSeries: times and values differ in length");
    for (double v : values) {
        if (!std::isfinite(v)) throw ContractError("MetricSeries: non-finite value");
        // The biorthogonal metric is not sign-definite.
        if (kind != MetricKind::FR_biorthogonal && v < -1e-9)
            throw ContractError("MetricSeries: negative metric value " + std::to_string(v));
    }
}

double default_fd_step(double theta) { return 1e-5 * std::max(1.0, std::abs(theta)); }

Complex fr_metric_pure(const StateVector& psi, const StateVector& dpsi_i, const StateVector& dpsi_j) {
    if (psi.size() != dpsi_i.size() || psi.size() != dpsi_j.size())
        throw ContractError("fr_metric_pure: dimension mismatch");
    if (std::abs(psi.squaredNorm() - 1.0) > 1e-8)
        throw ContractError("fr_metric_pure: state is not unit-norm");
    return dpsi_i.dot(dpsi_j) - psi.dot(dpsi_i) * dpsi_j.dot(psi);
}

Complex fr_metric_biorthogonal(const StateVector& psi, const LeftStateVector& psitilde,
                               const LeftStateVector& dpsitilde_i, const StateVector& dpsi_j) {
    if (psi.size() != psitilde.size() || psi.size() != dpsitilde_i.size() || psi.size() != dpsi_j.size())
        throw ContractError("fr_metric_biorthogonal: dimension mismatch");
    const Complex overlap = psitilde.dot(psi);
    if (std::abs(overlap - 1.0) > 1e-8) {
        std::ostringstream msg;
        msg << "fr_metric_biorthogonal: <psitilde|psi> = " << overlap << " is not 1";
        throw ContractError(msg.str());
    }
    return dpsitilde_i.dot(dpsi_j) - dpsitilde_i.dot(psi) * psitilde.dot(dpsi_j);
}

namespace {

void require_hermitian_derivative(const Operator& drho, const char* what) {
    const double scale = std::max(1.0, drho.cwiseAbs().maxCoeff());
    if (hermiticity_defect(drho) > 1e-8 * scale) throw ContractError(std::string(what) + ": drho is not Hermitian");
}

}  // namespace

double qfi_mixed(const DensityMatrix& rho, const Operator& drho, double eigen_cutoff) {
    validate_density_matrix(rho, "qfi_mixed");
    if (drho.rows() != rho.rows() || drho.cols() != rho.cols())
        throw ContractError("qfi_mixed: dimension mismatch");
    require_hermitian_derivative(drho, "qfi_mixed");
    Eigen::SelfAdjointEigenSolver<Operator> solver(hermitize(rho));
    const Eigen::VectorXd& lambda = solver.eigenvalues();
    const Operator& basis = solver.eigenvectors();
    const Operator d = basis.adjoint() * hermitize(drho) * basis;
    double f = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        for (Eigen::Index j = 0; j < lambda.size(); ++j) {
            const double denom = lambda(i) + lambda(j);
            if (denom > eigen_cutoff) f += 2.0 * std::norm(d(i, j)) / denom;
        }
    return f;
}

double cfi(const DensityMatrix& rho, const Operator& drho, const std::vector<Operator>& povm) {
    validate_density_matrix(rho, "cfi");
    if (drho.rows() != rho.rows() || drho.cols() != rho.cols()) throw ContractError("cfi: dimension mismatch");
    require_hermitian_derivative(drho, "cfi");
    if (povm.empty()) throw ContractError("cfi: empty POVM");
    Operator total = Operator::Zero(rho.rows(), rho.cols());
    for (const auto& e : povm) {
        if (e.rows() != rho.rows() || e.cols() != rho.cols()) throw ContractError("cfi: POVM element dimension mismatch");
        if (hermiticity_defect(e) > 1e-8) throw ContractError("cfi: POVM element is not Hermitian");
        const double lowest =
            Eigen::SelfAdjointEigenSolver<Operator>(hermitize(e), Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
        if (lowest < -1e-8) throw ContractError("cfi: POVM element is not positive semidefinite");
        total += e;
    }
    if ((total - Operator::Identity(rho.rows(), rho.cols())).cwiseAbs().maxCoeff() > 1e-8)
        throw ContractError("cfi: POVM elements do not sum to the identity");
    double f = 0.0;
    for (const auto& e : povm) {
        const double p = (e * rho).trace().real();
        if (p <= 1e-12) continue;
        const double dp = (e * drho).trace().real();
        f += dp * dp / p;
    }
    return f;
}

std::vector<Operator> computational_povm(Eigen::Index dim) {
    std::vector<Operator> out;
    for (Eigen::Index k = 0; k < dim; ++k) {
        Operator p = Operator::Zero(dim, dim);
        p(k, k) = 1.0;
        out.push_back(std::move(p));
    }
    return out;
}

double qfi_from_central_difference(const DensityMatrix& rho, const DensityMatrix& plus, const DensityMatrix& minus,
                                   double step) {
    const Operator drho = hermitize((plus - minus) / (2.0 * step));
    return qfi_mixed(rho, drho);
}

namespace {

double inf_norm(const Operator& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

MetricSeries schrodinger_metric(const ModelSpec& model, const std::string& param, const TimeGrid& grid,
                                const MetricOptions& options) {
    const double theta = model.parameters().get(param);
    const double h = options.fd_step.value_or(default_fd_step(theta));
    const StateVector psi0 = model.schrodinger_initial_state();
    const Operator h_base = model.hamiltonian();
    // Shared substep count so all three trajectories see the same discretization.
    const int n_sub = options.substeps > 0 ? options.substeps : auto_substeps(grid.step(), inf_norm(h_base));

    const auto base = evolve_pair(h_base, psi0, grid, std::nullopt, n_sub);
    const auto plus = evolve_pair(model.with_parameter(param, theta + h).hamiltonian(), psi0, grid, std::nullopt, n_sub);
    const auto minus =
        evolve_pair(model.with_parameter(param, theta - h).hamiltonian(), psi0, grid, std::nullopt, n_sub);

    MetricSeries out;
    out.kind = MetricKind::FR_biorthogonal;
    out.param = param;
    out.times = grid.times();
    out.values.reserve(out.times.size());
    for (std::size_t k = 0; k < out.times.size(); ++k) {
        const StateVector& psi = base.right_states[k];
        const LeftStateVector& psitilde = base.left_states[k];
        const auto ref = phase_reference_index(psi);
        const Complex target = phase_alignment_factor(psi, ref);
        // Same unit phase on ψ and ψ̃ keeps ⟨ψ̃|ψ⟩ fixed.
        const Complex cp = phase_alignment_factor(plus.right_states[k], ref) / target;
        const Complex cm = phase_alignment_factor(minus.right_states[k], ref) / target;
        const StateVector dpsi = (cp * plus.right_states[k] - cm * minus.right_states[k]) / (2.0 * h);
        const LeftStateVector dpsitilde = (cp * plus.left_states[k] - cm * minus.left_states[k]) / (2.0 * h);
        const Complex g = fr_metric_biorthogonal(psi, psitilde, dpsitilde, dpsi);
        if (std::abs(g.imag()) > 1e-8 * std::max(1.0, std::abs(g.real()))) {
            std::ostringstream msg;
            msg << "metric_vs_time: biorthogonal metric has imaginary part " << g.imag() << " at t=" << out.times[k];
            throw Error(msg.str());
        }
        out.values.push_back(g.real());
    }
    return out;
}

InformationSeries lindblad_series(const ModelSpec& model, const std::string& param, const TimeGrid& grid,
                                  const MetricOptions& options) {
    const double theta = model.parameters().get(param);
    const double h = options.fd_step.value_or(default_fd_step(theta));
    const DensityMatrix rho0 = model.lindblad_initial_state();
    const LindbladSpec spec = model.lindblad();
    const int n_sub = options.substeps > 0 ? options.substeps : master_substeps(liouvillian(spec), grid.step());

    const auto base = integrate_master(spec, rho0, grid, n_sub);
    const auto plus = integrate_master(model.with_parameter(param, theta + h).lindblad(), rho0, grid, n_sub);
    const auto minus = integrate_master(model.with_parameter(param, theta - h).lindblad(), rho0, grid, n_sub);

    InformationSeries out;
    out.qfi.kind = MetricKind::QFI_mixed;
    out.cfi.kind = MetricKind::CFI;
    out.qfi.param = out.cfi.param = param;
    out.qfi.times = out.cfi.times = grid.times();
    const auto povm = computational_povm(model.dim());
    for (std::size_t k = 0; k < out.qfi.times.size(); ++k) {
        out.qfi.values.push_back(qfi_from_central_difference(base[k], plus[k], minus[k], h));
        out.cfi.values.push_back(cfi(base[k], hermitize((plus[k] - minus[k]) / (2.0 * h)), povm));
    }
    return out;
}

}  // namespace

MetricSeries metric_vs_time(const ModelSpec& model, DynamicsKind dynamics, const std::string& param,
                            const TimeGrid& grid, const MetricOptions& options) {
    grid.validate();
    if (!model.parameters().contains(param)) throw ContractError("metric_vs_time: unknown parameter '" + param + "'");
    if (options.substeps < 0) throw ContractError("metric_vs_time: substeps must be >= 0");
    MetricSeries out = dynamics == DynamicsKind::SchrodingerBiorthogonal ? schrodinger_metric(model, param, grid, options)
                                                                         : lindblad_series(model, param, grid, options).qfi;
    out.validate();
    return out;
}

InformationSeries lindblad_information(const ModelSpec& model, const std::string& param, const TimeGrid& grid,
                                       const MetricOptions& options) {
    grid.validate();
    if (!model.parameters().contains(param))
        throw ContractError("lindblad_information: unknown parameter '" + param + "'");
    if (options.substeps < 0) throw ContractError("lindblad_information: substeps must be >= 0");
    InformationSeries out = lindblad_series(model, param, grid, options);
    out.qfi.validate();
    out.cfi.validate();
    return out;
}

}  // namespace nhqfi
