#include <CLI11.hpp>

#include <iostream>

#include "nhqfi/config.hpp"
#include "nhqfi/scenarios.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Run a non-Hermitian metrology scenario and write CSV results"};
    std::string config_path;
    std::string out_dir;
    long long seed = 0;
    app.add_option("config", config_path, "Scenario config (flat YAML mapping)")->required();
    app.add_option("--out", out_dir, "Output directory (overrides the config's output key)");
    app.add_option("--seed", seed, "Reserved; all scenarios are deterministic");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    nhqfi::RunConfig config;
    try {
        config = nhqfi::load_config(config_path);
    } catch (const nhqfi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        const auto files = nhqfi::run(config, out_dir.empty() ? config.output : out_dir, std::cerr);
        for (const auto& f : files) std::cout << f.string() << "\n";
    } catch (const nhqfi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
