#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nhqfi/errors.hpp"
#include "nhqfi/lindblad.hpp"

namespace nhqfi {

enum class Scenario { Spectrum, PhaseMap, Evolve, Metric, LindbladMetric, ControlOpt, YangLee };
enum class ModelKind { TwoLevel, YangLee };
/// Default: |+…+⟩ for Schrödinger pipelines, |0…0⟩ for Lindblad ones.
enum class InitialState { Default, Plus, Zero };

std::string to_string(Scenario scenario);

/// Validated run description. Keys mirror the config file; see README for
/// which keys each scenario reads.
struct RunConfig {
    Scenario scenario = Scenario::Spectrum;
    ModelKind model = ModelKind::TwoLevel;

    std::optional<double> s, r;
    std::optional<double> lam, kappa;
    std::vector<int> n_sites{1};
    bool periodic = true;

    /// r/s values: the spectrum scan axis, or the family of lindblad-metric runs.
    std::vector<double> ratios;
    double ratio_min = 0.0, ratio_max = 2.0, ratio_step = 0.01;

    double lam_min = -2.0, lam_max = 2.0, kappa_min = -2.0, kappa_max = 2.0;
    int grid_points = 21;

    double t_start = 0.0, t_end = 10.0;
    int n_steps = 100;
    std::string param;
    std::optional<double> fd_step;
    int substeps = 0;

    double T = 10.0;
    int M = 100;
    int max_iter = 200;
    double learning_rate = 1.0;
    double grad_step = 1e-4;
    double ftol = 1e-10;
    double amplitude_bound = 0.0;

    GammaPolicy gamma_policy = GammaPolicy::Shift;
    InitialState initial = InitialState::Default;
    std::string output = ".";
};

/// Parses a flat YAML mapping. Syntax errors and unknown keys raise
/// ConfigError with the offending line; invalid values name the field.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace nhqfi
