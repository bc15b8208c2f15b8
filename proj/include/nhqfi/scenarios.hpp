#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nhqfi/config.hpp"
#include "nhqfi/metrology.hpp"

namespace nhqfi {

/// Comma-separated table with a header row; numbers use 17 significant digits.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(const std::vector<double>& values);
    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::size_t columns_;
    std::string text_;
};

/// Shortest round-trip decimal form of `v`, used in file names.
std::string format_number(double v);

/// Full-precision decimal form of `v` (17 significant digits).
std::string format_csv_number(double v);

/// Model described by the config for one chain length.
ModelSpec model_from_config(const RunConfig& config, int n_sites);

/// Executes the scenario, writes its CSV files under `out_dir` and returns
/// their paths. Diagnostics go to `log`.
std::vector<std::filesystem::path> run(const RunConfig& config, const std::filesystem::path& out_dir,
                                       std::ostream& log);

}  // namespace nhqfi
