#pragma once

#include "sheath/config.hpp"
#include "sheath/euler_limit.hpp"
#include "sheath/grid.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace sheath {

/// Preset initial data sampled at the cell centers.
FluidState make_initial(const InitialData& spec, const Grid1D& grid);

/// 17 significant digits.
std::string format_number(double v);

/// Writes through a temporary file in the same directory and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Runs the configured pipeline, writes its files under `output_dir` and prints a
/// one-line summary to `out`. Returns 0, 1 (invalid input) or 2 (solver failure).
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace sheath
