#include "nhqfi/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace nhqfi {

std::string to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::Spectrum: return "spectrum";
        case Scenario::PhaseMap: return "phase-map";
        case Scenario::Evolve: return "evolve";
        case Scenario::Metric: return "metric";
        case Scenario::LindbladMetric: return "lindblad-metric";
        case Scenario::ControlOpt: return "control-opt";
        case Scenario::YangLee: return "yang-lee";
    }
    return "?";
}

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line + 1; }

[[noreturn]] void fail(const std::string& field, const YAML::Node& node, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line_of(node)) + ": field '" + field + "' " + what, field,
                      line_of(node));
}

std::string as_string(const std::string& field, const YAML::Node& node) {
    if (!node.IsScalar()) fail(field, node, "must be a scalar");
    return node.Scalar();
}

double as_double(const std::string& field, const YAML::Node& node) {
    if (!node.IsScalar()) fail(field, node, "must be a number");
    double v = 0.0;
    if (!YAML::convert<double>::decode(node, v)) fail(field, node, "must be a number, got '" + node.Scalar() + "'");
    if (!std::isfinite(v)) fail(field, node, "must be finite");
    return v;
}

int as_int(const std::string& field, const YAML::Node& node) {
    const double v = as_double(field, node);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(field, node, "must be an integer");
    return static_cast<int>(v);
}

bool as_bool(const std::string& field, const YAML::Node& node) {
    bool v = false;
    if (!node.IsScalar() || !YAML::convert<bool>::decode(node, v)) fail(field, node, "must be true or false");
    return v;
}

template <class T, class Convert>
std::vector<T> as_list(const std::string& field, const YAML::Node& node, Convert convert) {
    std::vector<T> out;
    if (node.IsSequence()) {
        for (const auto& item : node) out.push_back(convert(field, item));
        if (out.empty()) fail(field, node, "must not be empty");
    } else {
        out.push_back(convert(field, node));
    }
    return out;
}

[[noreturn]] void missing(const std::string& field, Scenario scenario) {
    throw ConfigError("missing required field '" + field + "' for scenario " + to_string(scenario), field);
}

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
    throw ConfigError("field '" + field + "' " + what, field);
}

void validate(RunConfig& c, const std::map<std::string, int>& seen) {
    auto has = [&](const char* key) { return seen.count(key) > 0; };
    const bool yang_lee = c.model == ModelKind::YangLee;

    switch (c.scenario) {
        case Scenario::Spectrum:
            if (yang_lee) invalid("model", "must be two-level for the spectrum scenario");
            if (!c.s) missing("s", c.scenario);
            break;
        case Scenario::PhaseMap:
        case Scenario::YangLee:
            if (!has("model")) c.model = ModelKind::YangLee;
            if (c.model != ModelKind::YangLee) invalid("model", "must be yang-lee for scenario " + to_string(c.scenario));
            if (c.scenario == Scenario::YangLee) {
                if (!c.lam) missing("lam", c.scenario);
                if (!c.kappa) missing("kappa", c.scenario);
            }
            break;
        case Scenario::LindbladMetric:
            if (!yang_lee && !c.ratios.empty()) {
                if (!c.r) missing("r", c.scenario);
                if (c.s) invalid("s", "cannot be combined with ratios (s = r / ratio)");
                for (double q : c.ratios)
                    if (!(q > 0.0)) invalid("ratios", "entries must be > 0");
                break;
            }
            [[fallthrough]];
        case Scenario::Evolve:
        case Scenario::Metric:
        case Scenario::ControlOpt:
            if (yang_lee) {
                if (!c.lam) missing("lam", c.scenario);
                if (!c.kappa) missing("kappa", c.scenario);
            } else {
                if (!c.s) missing("s", c.scenario);
                if (!c.r) missing("r", c.scenario);
            }
            break;
    }

    for (int n : c.n_sites)
        if (n < 1 || n > 8) invalid("n_sites", "entries must lie in 1..8");
    if (c.model != ModelKind::YangLee && has("n_sites") && c.n_sites != std::vector<int>{1})
        invalid("n_sites", "applies to the yang-lee model only");
    if (c.n_steps < 1) invalid("n_steps", "must be >= 1");
    if (!(c.t_end > c.t_start)) invalid("t_end", "must exceed t_start");
    if (!(c.ratio_step > 0.0)) invalid("ratio_step", "must be > 0");
    if (!(c.ratio_max >= c.ratio_min)) invalid("ratio_max", "must be >= ratio_min");
    if (c.grid_points < 2) invalid("grid_points", "must be >= 2");
    if (!(c.lam_max >= c.lam_min)) invalid("lam_max", "must be >= lam_min");
    if (!(c.kappa_max >= c.kappa_min)) invalid("kappa_max", "must be >= kappa_min");
    if (c.fd_step && !(*c.fd_step > 0.0)) invalid("fd_step", "must be > 0");
    if (c.substeps < 0) invalid("substeps", "must be >= 0");
    if (!(c.T > 0.0)) invalid("T", "must be > 0");
    if (c.M < 1) invalid("M", "must be >= 1");
    if (c.max_iter < 0) invalid("max_iter", "must be >= 0");
    if (!(c.learning_rate > 0.0)) invalid("learning_rate", "must be > 0");
    if (!(c.grad_step > 0.0)) invalid("grad_step", "must be > 0");
    if (!(c.ftol >= 0.0)) invalid("ftol", "must be >= 0");
    if (!(c.amplitude_bound >= 0.0)) invalid("amplitude_bound", "must be >= 0");

    const bool chain = c.model == ModelKind::YangLee;
    if (c.param.empty()) c.param = chain ? "kappa" : "s";
    const bool known = chain ? (c.param == "lam" || c.param == "kappa") : (c.param == "s" || c.param == "r");
    if (!known) invalid("param", "must be " + std::string(chain ? "lam or kappa" : "s or r"));
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("config line " + std::to_string(e.mark.line + 1) + ": " + e.msg, {}, e.mark.line + 1);
    }
    if (!root.IsMap()) throw ConfigError("config must be a mapping of key: value pairs", {}, std::nullopt);

    RunConfig c;
    using Setter = std::function<void(const std::string&, const YAML::Node&)>;
    auto real = [](double& dst) -> Setter { return [&dst](auto& k, auto& n) { dst = as_double(k, n); }; };
    auto opt_real = [](std::optional<double>& dst) -> Setter { return [&dst](auto& k, auto& n) { dst = as_double(k, n); }; };
    auto integer = [](int& dst) -> Setter { return [&dst](auto& k, auto& n) { dst = as_int(k, n); }; };

    const std::map<std::string, Setter> setters{
        {"scenario",
         [&](auto& k, auto& n) {
             static const std::map<std::string, Scenario> names{
                 {"spectrum", Scenario::Spectrum}, {"phase-map", Scenario::PhaseMap},
                 {"evolve", Scenario::Evolve}, {"metric", Scenario::Metric},
                 {"lindblad-metric", Scenario::LindbladMetric}, {"control-opt", Scenario::ControlOpt},
                 {"yang-lee", Scenario::YangLee}};
             const auto it = names.find(as_string(k, n));
             if (it == names.end()) fail(k, n, "has unknown value '" + n.Scalar() + "'");
             c.scenario = it->second;
         }},
        {"model",
         [&](auto& k, auto& n) {
             const std::string v = as_string(k, n);
             if (v == "two-level")
                 c.model = ModelKind::TwoLevel;
             else if (v == "yang-lee")
                 c.model = ModelKind::YangLee;
             else
                 fail(k, n, "must be two-level or yang-lee");
         }},
        {"s", opt_real(c.s)},
        {"r", opt_real(c.r)},
        {"lam", opt_real(c.lam)},
        {"kappa", opt_real(c.kappa)},
        {"n_sites", [&](auto& k, auto& n) { c.n_sites = as_list<int>(k, n, as_int); }},
        {"periodic", [&](auto& k, auto& n) { c.periodic = as_bool(k, n); }},
        {"ratios", [&](auto& k, auto& n) { c.ratios = as_list<double>(k, n, as_double); }},
        {"ratio_min", real(c.ratio_min)},
        {"ratio_max", real(c.ratio_max)},
        {"ratio_step", real(c.ratio_step)},
        {"lam_min", real(c.lam_min)},
        {"lam_max", real(c.lam_max)},
        {"kappa_min", real(c.kappa_min)},
        {"kappa_max", real(c.kappa_max)},
        {"grid_points", integer(c.grid_points)},
        {"t_start", real(c.t_start)},
        {"t_end", real(c.t_end)},
        {"n_steps", integer(c.n_steps)},
        {"param", [&](auto& k, auto& n) { c.param = as_string(k, n); }},
        {"fd_step", opt_real(c.fd_step)},
        {"substeps", integer(c.substeps)},
        {"T", real(c.T)},
        {"M", integer(c.M)},
        {"max_iter", integer(c.max_iter)},
        {"learning_rate", real(c.learning_rate)},
        {"grad_step", real(c.grad_step)},
        {"ftol", real(c.ftol)},
        {"amplitude_bound", real(c.amplitude_bound)},
        {"gamma_policy",
         [&](auto& k, auto& n) {
             const std::string v = as_string(k, n);
             if (v == "shift")
                 c.gamma_policy = GammaPolicy::Shift;
             else if (v == "strict")
                 c.gamma_policy = GammaPolicy::Strict;
             else
                 fail(k, n, "must be shift or strict");
         }},
        {"initial",
         [&](auto& k, auto& n) {
             const std::string v = as_string(k, n);
             if (v == "plus")
                 c.initial = InitialState::Plus;
             else if (v == "zero")
                 c.initial = InitialState::Zero;
             else
                 fail(k, n, "must be plus or zero");
         }},
        {"output", [&](auto& k, auto& n) { c.output = as_string(k, n); }},
    };

    std::map<std::string, int> seen;
    for (const auto& entry : root) {
        const YAML::Node& key = entry.first;
        if (!key.IsScalar()) fail("?", key, "keys must be plain names");
        const std::string name = key.Scalar();
        const auto it = setters.find(name);
        if (it == setters.end())
            throw ConfigError("config line " + std::to_string(line_of(key)) + ": unknown key '" + name + "'", name,
                              line_of(key));
        if (!seen.emplace(name, line_of(key)).second) fail(name, key, "appears twice");
        it->second(name, entry.second);
    }
    if (!seen.count("scenario")) throw ConfigError("missing required field 'scenario'", "scenario");
    validate(c, seen);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace nhqfi
