#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "nhqfi/config.hpp"
#include "nhqfi/control.hpp"
#include "nhqfi/dynamics.hpp"
#include "nhqfi/lindblad.hpp"
#include "nhqfi/metrology.hpp"
#include "nhqfi/models.hpp"
#include "nhqfi/operators.hpp"
#include "nhqfi/scenarios.hpp"

namespace py = pybind11;
using namespace nhqfi;

namespace {

GammaPolicy policy_from(const std::string& name) {
    if (name == "shift") return GammaPolicy::Shift;
    if (name == "strict") return GammaPolicy::Strict;
    throw ContractError("gamma_policy must be 'shift' or 'strict'");
}

TimeGrid grid_from(double t_start, double t_end, int n_steps) { return {t_start, t_end, n_steps}; }

py::dict series_dict(const MetricSeries& s) {
    py::dict d;
    d["times"] = s.times;
    d["values"] = s.values;
    d["kind"] = to_string(s.kind);
    d["param"] = s.param;
    return d;
}

}  // namespace

PYBIND11_MODULE(nhqfi, m) {
    m.doc() = "Fisher information of non-Hermitian and open quantum systems";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ContractError>(m, "ContractError", base.ptr());
    py::register_exception<PhaseDomainError>(m, "PhaseDomainError", base.ptr());
    py::register_exception<DefectiveMatrixError>(m, "DefectiveMatrixError", base.ptr());
    py::register_exception<SelfOrthogonalError>(m, "SelfOrthogonalError", base.ptr());
    py::register_exception<IntegrationError>(m, "IntegrationError", base.ptr());
    py::register_exception<DecayUnderflowError>(m, "DecayUnderflowError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    m.def("pauli", [](const std::string& axis) {
        if (axis == "x") return pauli(Axis::X);
        if (axis == "y") return pauli(Axis::Y);
        if (axis == "z") return pauli(Axis::Z);
        if (axis == "i") return pauli(Axis::Identity);
        throw ContractError("axis must be one of x, y, z, i");
    });
    m.def("two_level_hamiltonian", [](double s, double r) { return build_two_level({s, r}); }, py::arg("s"),
          py::arg("r"));
    m.def("two_level_eigenvalues", [](double s, double r) {
        const auto [ep, em] = two_level_eigenvalues({s, r});
        return py::make_tuple(ep, em);
    }, py::arg("s"), py::arg("r"));
    m.def("yang_lee_hamiltonian",
          [](double lam, double kappa, int n_sites, bool periodic) {
              return build_yang_lee({lam, kappa, n_sites, periodic});
          },
          py::arg("lam"), py::arg("kappa"), py::arg("n_sites"), py::arg("periodic") = true);
    m.def("biorthogonal_eig", [](const Operator& h, double tol) {
        const auto es = biorthogonal_eig(h, tol);
        return py::make_tuple(es.eigenvalues, es.right, es.left);
    }, py::arg("h"), py::arg("tol") = 1e-9, "Returns (eigenvalues, right vectors, left vectors).");
    m.def("classify_phase", [](const Operator& h, double tol) {
        const auto label = classify_phase(h, tol);
        return py::make_tuple(to_string(label.label), label.max_abs_im, label.min_gap);
    }, py::arg("h"), py::arg("tol") = 1e-9);

    m.def("evolve_pair",
          [](const Operator& h, const StateVector& psi0, double t_start, double t_end, int n_steps, int substeps) {
              const auto res = evolve_pair(h, psi0, grid_from(t_start, t_end, n_steps), std::nullopt, substeps);
              return py::make_tuple(res.grid.times(), res.right_states, res.left_states);
          },
          py::arg("h"), py::arg("psi0"), py::arg("t_start"), py::arg("t_end"), py::arg("n_steps"),
          py::arg("substeps") = 0, "Returns (times, right states, left states).");
    m.def("closed_form_two_level", [](double s, double r, double t) {
        const auto st = closed_form_two_level({s, r}, t);
        return py::make_tuple(st.right, st.left, st.norm);
    }, py::arg("s"), py::arg("r"), py::arg("t"));

    m.def("integrate_master",
          [](const Operator& h_plus, const std::vector<Operator>& jump_ops, const DensityMatrix& rho0, double t_start,
             double t_end, int n_steps, int substeps) {
              return integrate_master({h_plus, jump_ops}, rho0, grid_from(t_start, t_end, n_steps), substeps);
          },
          py::arg("h_plus"), py::arg("jump_ops"), py::arg("rho0"), py::arg("t_start"), py::arg("t_end"),
          py::arg("n_steps"), py::arg("substeps") = 0);

    py::class_<ModelSpec>(m, "Model")
        .def_static("two_level",
                    [](double s, double r, const std::string& policy) {
                        ModelSpec spec;
                        spec.params = TwoLevelParams{s, r};
                        spec.gamma_policy = policy_from(policy);
                        return spec;
                    },
                    py::arg("s"), py::arg("r"), py::arg("gamma_policy") = "shift")
        .def_static("yang_lee",
                    [](double lam, double kappa, int n_sites, const std::string& policy) {
                        ModelSpec spec;
                        spec.params = YangLeeParams{lam, kappa, n_sites, true};
                        spec.gamma_policy = policy_from(policy);
                        return spec;
                    },
                    py::arg("lam"), py::arg("kappa"), py::arg("n_sites"), py::arg("gamma_policy") = "shift")
        .def_property_readonly("dim", &ModelSpec::dim)
        .def("hamiltonian", &ModelSpec::hamiltonian)
        .def("lindblad_initial_state", &ModelSpec::lindblad_initial_state)
        .def("schrodinger_initial_state", &ModelSpec::schrodinger_initial_state)
        .def("parameters", [](const ModelSpec& spec) {
            const auto p = spec.parameters();
            py::dict d;
            for (std::size_t i = 0; i < p.names.size(); ++i) d[py::str(p.names[i])] = p.values[i];
            return d;
        });

    m.def("metric_vs_time",
          [](const ModelSpec& model, const std::string& dynamics, const std::string& param, double t_start,
             double t_end, int n_steps, std::optional<double> fd_step, int substeps) {
              DynamicsKind kind;
              if (dynamics == "schrodinger")
                  kind = DynamicsKind::SchrodingerBiorthogonal;
              else if (dynamics == "lindblad")
                  kind = DynamicsKind::Lindblad;
              else
                  throw ContractError("dynamics must be 'schrodinger' or 'lindblad'");
              return series_dict(
                  metric_vs_time(model, kind, param, grid_from(t_start, t_end, n_steps), {fd_step, substeps}));
          },
          py::arg("model"), py::arg("dynamics"), py::arg("param"), py::arg("t_start"), py::arg("t_end"),
          py::arg("n_steps"), py::arg("fd_step") = py::none(), py::arg("substeps") = 0);
    m.def("lindblad_information",
          [](const ModelSpec& model, const std::string& param, double t_start, double t_end, int n_steps) {
              const auto info = lindblad_information(model, param, grid_from(t_start, t_end, n_steps));
              return py::make_tuple(series_dict(info.qfi), series_dict(info.cfi));
          },
          py::arg("model"), py::arg("param"), py::arg("t_start"), py::arg("t_end"), py::arg("n_steps"));

    m.def("fr_metric_pure", &fr_metric_pure, py::arg("psi"), py::arg("dpsi_i"), py::arg("dpsi_j"));
    m.def("fr_metric_biorthogonal", &fr_metric_biorthogonal, py::arg("psi"), py::arg("psitilde"),
          py::arg("dpsitilde_i"), py::arg("dpsi_j"));
    m.def("qfi_mixed", &qfi_mixed, py::arg("rho"), py::arg("drho"), py::arg("eigen_cutoff") = 1e-12);
    m.def("cfi", [](const DensityMatrix& rho, const Operator& drho, std::optional<std::vector<Operator>> povm) {
        return cfi(rho, drho, povm ? *povm : computational_povm(rho.rows()));
    }, py::arg("rho"), py::arg("drho"), py::arg("povm") = py::none());

    m.def("control_hamiltonian", &control_hamiltonian, py::arg("u"), py::arg("n_sites"));
    m.def("objective_qfi",
          [](const ModelSpec& model, const std::string& param, const Eigen::MatrixX3d& amplitudes, double horizon) {
              ControlSchedule s = ControlSchedule::zeros(horizon, static_cast<int>(amplitudes.rows()));
              s.amplitudes = amplitudes;
              return objective_qfi(s, model, param, model.lindblad_initial_state());
          },
          py::arg("model"), py::arg("param"), py::arg("amplitudes"), py::arg("horizon"));
    m.def("optimize_controls",
          [](const ModelSpec& model, const std::string& param, double horizon, int n_intervals, int max_iter,
             double learning_rate) {
              OptimizeOptions opts;
              opts.max_iter = max_iter;
              opts.learning_rate = learning_rate;
              const auto rep = optimize_controls(ControlSchedule::zeros(horizon, n_intervals), model, param,
                                                 model.lindblad_initial_state(), opts);
              py::dict d;
              d["iterations"] = rep.iterations;
              d["objective_trace"] = rep.objective_trace;
              d["amplitudes"] = rep.final_schedule.amplitudes;
              d["converged"] = rep.converged;
              d["message"] = rep.message;
              return d;
          },
          py::arg("model"), py::arg("param"), py::arg("horizon") = 10.0, py::arg("n_intervals") = 100,
          py::arg("max_iter") = 200, py::arg("learning_rate") = 1.0);

    m.def("run_config",
          [](const std::string& text, const std::string& out_dir) {
              std::ostringstream log;
              const auto files = run(parse_config(text), out_dir, log);
              return py::make_tuple(files, log.str());
          },
          py::arg("text"), py::arg("out_dir"), "Parse a config document, run it, return (files, log).");
}
