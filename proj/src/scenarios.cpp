#include "nhqfi/scenarios.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "nhqfi/control.hpp"
#include "nhqfi/dynamics.hpp"
#include "nhqfi/models.hpp"

namespace nhqfi {

namespace fs = std::filesystem;

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
    text_ += '\n';
}

void CsvTable::add_row(const std::vector<double>& values) {
    if (values.size() != columns_) throw ContractError("CsvTable: row has the wrong number of columns");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) text_ += ',';
        text_ += format_csv_number(values[i]);
    }
    text_ += '\n';
}

std::string CsvTable::str() const { return text_; }

void CsvTable::write(const fs::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text_;
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::string format_number(double v) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_csv_number(double v) {
    if (v == 0.0) v = 0.0;  // drop the sign of negative zero
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

ModelSpec model_from_config(const RunConfig& c, int n_sites) {
    ModelSpec m;
    if (c.model == ModelKind::TwoLevel)
        m.params = TwoLevelParams{c.s.value_or(0.0), c.r.value_or(0.0)};
    else
        m.params = YangLeeParams{c.lam.value_or(0.0), c.kappa.value_or(0.0), n_sites, c.periodic};
    m.gamma_policy = c.gamma_policy;
    if (c.initial == InitialState::Plus) m.initial_state = plus_state(n_sites);
    if (c.initial == InitialState::Zero) m.initial_state = zero_state(n_sites);
    return m;
}

namespace {

TimeGrid grid_from(const RunConfig& c) { return {c.t_start, c.t_end, c.n_steps}; }

/// One (suffix, model) per requested chain length; a single unsuffixed entry
/// for the two-level model.
std::vector<std::pair<std::string, ModelSpec>> models(const RunConfig& c) {
    std::vector<std::pair<std::string, ModelSpec>> out;
    if (c.model == ModelKind::TwoLevel) {
        out.emplace_back("", model_from_config(c, 1));
    } else {
        for (int n : c.n_sites) out.emplace_back("_N" + std::to_string(n), model_from_config(c, n));
    }
    return out;
}

void log_phase(std::ostream& log, const std::string& tag, const ModelSpec& m) {
    const auto label = classify_phase(m.hamiltonian());
    log << tag << "phase " << to_string(label.label) << " (max|Im E| = " << label.max_abs_im
        << ", min gap = " << label.min_gap << ")\n";
}

std::vector<double> ratio_axis(const RunConfig& c) {
    if (!c.ratios.empty()) return c.ratios;
    const auto n = static_cast<long>(std::floor((c.ratio_max - c.ratio_min) / c.ratio_step + 1e-9));
    std::vector<double> out;
    for (long k = 0; k <= n; ++k) out.push_back(c.ratio_min + static_cast<double>(k) * c.ratio_step);
    return out;
}

std::vector<fs::path> run_spectrum(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    const double s = *c.s;
    if (c.r) log_phase(log, "spectrum: (s, r) = (" + format_number(s) + ", " + format_number(*c.r) + ") ", model_from_config(c, 1));
    CsvTable table({"ratio", "re_E_plus", "im_E_plus", "re_E_minus", "im_E_minus"});
    for (double q : ratio_axis(c)) {
        const auto [ep, em] = two_level_eigenvalues({s, q * s});
        table.add_row({q, ep.real(), ep.imag(), em.real(), em.imag()});
    }
    const fs::path path = dir / "spectrum.csv";
    table.write(path);
    return {path};
}

std::vector<fs::path> run_phase_map(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    std::vector<std::pair<double, double>> points;
    const int n = c.grid_points;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            points.emplace_back(c.lam_min + (c.lam_max - c.lam_min) * i / (n - 1),
                                c.kappa_min + (c.kappa_max - c.kappa_min) * j / (n - 1));
    std::vector<fs::path> out;
    for (int sites : c.n_sites) {
        CsvTable table({"lam", "kappa", "phase", "max_abs_im", "min_gap"});
        int broken = 0;
        for (const auto& p : phase_scan_yang_lee(sites, points)) {
            table.add_row({p.point[0], p.point[1], static_cast<double>(p.phase.label), p.phase.max_abs_im,
                           p.phase.min_gap});
            broken += p.phase.label == Phase::Broken;
        }
        log << "phase-map N=" << sites << ": " << broken << " of " << points.size() << " points broken\n";
        out.push_back(dir / ("phase_map_N" + std::to_string(sites) + ".csv"));
        table.write(out.back());
    }
    return out;
}

std::vector<fs::path> run_evolve(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    std::vector<fs::path> out;
    for (const auto& [suffix, m] : models(c)) {
        log_phase(log, "evolve" + suffix + ": ", m);
        const auto res = evolve_pair(m.hamiltonian(), m.schrodinger_initial_state(), grid_from(c), std::nullopt,
                                     c.substeps);
        const Eigen::Index d = m.dim();
        std::vector<std::string> header{"t"};
        for (const char* who : {"psi", "psitilde"})
            for (Eigen::Index k = 0; k < d; ++k) {
                header.push_back(std::string("re_") + who + std::to_string(k));
                header.push_back(std::string("im_") + who + std::to_string(k));
            }
        for (const char* col : {"re_overlap", "im_overlap", "norm"}) header.emplace_back(col);
        CsvTable table(header);
        double worst = 0.0;
        for (std::size_t i = 0; i < res.grid.times().size(); ++i) {
            std::vector<double> row{res.grid.time(static_cast<int>(i))};
            for (const auto* v : {&res.right_states[i], &res.left_states[i]})
                for (Eigen::Index k = 0; k < d; ++k) {
                    row.push_back((*v)(k).real());
                    row.push_back((*v)(k).imag());
                }
            const Complex overlap = res.left_states[i].dot(res.right_states[i]);
            worst = std::max(worst, std::abs(overlap - 1.0));
            row.insert(row.end(), {overlap.real(), overlap.imag(), res.norm_factor[i]});
            table.add_row(row);
        }
        log << "evolve" << suffix << ": max |<psitilde|psi> - 1| = " << worst << "\n";
        out.push_back(dir / ("evolve" + suffix + ".csv"));
        table.write(out.back());
    }
    return out;
}

MetricOptions metric_options(const RunConfig& c) { return {c.fd_step, c.substeps}; }

std::vector<fs::path> run_metric(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    std::vector<fs::path> out;
    for (const auto& [suffix, m] : models(c)) {
        log_phase(log, "metric" + suffix + ": ", m);
        const auto series =
            metric_vs_time(m, DynamicsKind::SchrodingerBiorthogonal, c.param, grid_from(c), metric_options(c));
        CsvTable table({"t", "g"});
        for (std::size_t i = 0; i < series.times.size(); ++i) table.add_row({series.times[i], series.values[i]});
        out.push_back(dir / ("metric_" + c.param + suffix + ".csv"));
        table.write(out.back());
    }
    return out;
}

fs::path write_information(const ModelSpec& m, const RunConfig& c, const fs::path& path, const std::string& tag,
                           std::ostream& log) {
    log_phase(log, tag + ": ", m);
    const auto info = lindblad_information(m, c.param, grid_from(c), metric_options(c));
    CsvTable table({"t", "qfi", "cfi"});
    std::size_t peak = 0;
    for (std::size_t i = 0; i < info.qfi.times.size(); ++i) {
        table.add_row({info.qfi.times[i], info.qfi.values[i], info.cfi.values[i]});
        if (info.qfi.values[i] > info.qfi.values[peak]) peak = i;
    }
    log << tag << ": peak QFI " << info.qfi.values[peak] << " at t=" << info.qfi.times[peak] << "\n";
    table.write(path);
    return path;
}

std::vector<fs::path> run_lindblad_metric(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    std::vector<fs::path> out;
    if (c.model == ModelKind::TwoLevel && !c.ratios.empty()) {
        for (double q : c.ratios) {
            RunConfig one = c;
            one.s = *c.r / q;
            const std::string name = "lindblad_metric_ratio_" + format_number(q);
            out.push_back(write_information(model_from_config(one, 1), c, dir / (name + ".csv"), name, log));
        }
        return out;
    }
    for (const auto& [suffix, m] : models(c))
        out.push_back(write_information(m, c, dir / ("lindblad_metric" + suffix + ".csv"), "lindblad-metric" + suffix, log));
    return out;
}

std::vector<fs::path> run_yang_lee(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    std::vector<fs::path> out;
    for (const auto& [suffix, m] : models(c))
        out.push_back(write_information(m, c, dir / ("yang_lee" + suffix + ".csv"), "yang-lee" + suffix, log));
    return out;
}

std::vector<fs::path> run_control(const RunConfig& c, const fs::path& dir, std::ostream& log) {
    std::vector<fs::path> out;
    for (const auto& [suffix, m] : models(c)) {
        const DensityMatrix rho0 = m.lindblad_initial_state();
        const auto schedule0 = ControlSchedule::zeros(c.T, c.M, c.amplitude_bound);
        OptimizeOptions opts;
        opts.max_iter = c.max_iter;
        opts.grad_step = c.grad_step;
        opts.learning_rate = c.learning_rate;
        opts.ftol = c.ftol;
        opts.substeps = c.substeps;
        opts.fd_step = c.fd_step;
        const auto report = optimize_controls(schedule0, m, c.param, rho0, opts);
        log << "control-opt" << suffix << ": " << report.iterations << " iterations, objective "
            << report.objective_trace.front() << " -> " << report.objective_trace.back() << " (" << report.message
            << ")\n";
        if (!report.converged && report.message != "reached max_iter")
            throw IntegrationError("control-opt: " + report.message);

        CsvTable trace({"iteration", "objective"});
        for (std::size_t i = 0; i < report.objective_trace.size(); ++i)
            trace.add_row({static_cast<double>(i), report.objective_trace[i]});
        out.push_back(dir / ("control_objective" + suffix + ".csv"));
        trace.write(out.back());

        const auto& sched = report.final_schedule;
        CsvTable amps({"t_start", "t_end", "u_x", "u_y", "u_z"});
        for (int k = 0; k < sched.n_intervals; ++k)
            amps.add_row({k * sched.interval_length(), (k + 1) * sched.interval_length(), sched.amplitudes(k, 0),
                          sched.amplitudes(k, 1), sched.amplitudes(k, 2)});
        out.push_back(dir / ("control_schedule" + suffix + ".csv"));
        amps.write(out.back());

        // QFI along the optimized and the uncontrolled trajectories.
        const double theta = m.parameters().get(c.param);
        const double h = c.fd_step.value_or(default_fd_step(theta));
        auto boundary_qfi = [&](const ControlSchedule& s) {
            const auto base = evolve_controlled(m.lindblad(), s, rho0, report.substeps);
            const auto plus = evolve_controlled(m.with_parameter(c.param, theta + h).lindblad(), s, rho0, report.substeps);
            const auto minus = evolve_controlled(m.with_parameter(c.param, theta - h).lindblad(), s, rho0, report.substeps);
            std::vector<double> f;
            for (std::size_t i = 0; i < base.size(); ++i) f.push_back(qfi_from_central_difference(base[i], plus[i], minus[i], h));
            return f;
        };
        const auto controlled = boundary_qfi(sched);
        const auto free = boundary_qfi(schedule0);
        CsvTable series({"t", "qfi_controlled", "qfi_uncontrolled"});
        for (std::size_t i = 0; i < controlled.size(); ++i)
            series.add_row({static_cast<double>(i) * sched.interval_length(), controlled[i], free[i]});
        out.push_back(dir / ("control_metric" + suffix + ".csv"));
        series.write(out.back());
    }
    return out;
}

}  // namespace

std::vector<fs::path> run(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create output directory '" + out_dir.string() + "': " + ec.message());
    switch (config.scenario) {
        case Scenario::Spectrum: return run_spectrum(config, out_dir, log);
        case Scenario::PhaseMap: return run_phase_map(config, out_dir, log);
        case Scenario::Evolve: return run_evolve(config, out_dir, log);
        case Scenario::Metric: return run_metric(config, out_dir, log);
        case Scenario::LindbladMetric: return run_lindblad_metric(config, out_dir, log);
        case Scenario::ControlOpt: return run_control(config, out_dir, log);
        case Scenario::YangLee: return run_yang_lee(config, out_dir, log);
    }
    return {};
}

}  // namespace nhqfi
