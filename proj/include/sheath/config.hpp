#pragma once

#include "sheath/euler_poisson.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace sheath {

enum class Mode { profile, limit, simulate, converge, entropy };

std::string mode_name(Mode m);

enum class Preset { flat, bump, pulse };

/// Named initial data for the limit/full solvers.
struct InitialData {
    Preset preset = Preset::bump;
    double amplitude = 0.1;
    double center = 0.0; ///< 0 selects L/2
    double width = 0.0;  ///< 0 selects L/10
};

struct RunConfig {
    Mode mode = Mode::profile;
    PlasmaParams params;
    // profile mode
    double gamma = 1.0;
    double wall_value = 0.0;
    int profile_cells = 4096;
    // grids
    int cells = 2000;                    ///< uniform limit-grid cells; also the full grid when grading_ratio = 1
    double grading_ratio = 1.05;         ///< full-solver grid growth toward the interior, 1 for uniform
    double first_cell_fraction = 1.0 / 64.0; ///< first full-solver cell width / epsilon
    double interior_width = 1e-3;        ///< full-solver interior cell width
    // time
    double cfl = 0.4;
    double t_end = 0.2;
    int samples = 20;
    int limit_substeps = 20;
    // study
    std::vector<double> eps_list;
    int expansion_order = 1;
    int jobs = 1;
    bool bundle_export = false;
    InitialData initial;
    std::string output_dir = ".";
};

struct ConfigError {
    int line = 0; ///< 0 when the error is not tied to one line
    std::string message;

    std::string str() const;
};

struct ConfigResult {
    RunConfig config;
    std::vector<ConfigError> errors;

    bool ok() const { return errors.empty(); }
};

/// Parses `key = value` lines (`#` starts a comment). All problems are
/// collected; the config is fully range-checked when no error is reported.
ConfigResult parse_config(std::string_view text);

/// Range checks shared by the parser and command-line overrides.
std::vector<ConfigError> validate_config(const RunConfig& config);

}  // namespace sheath
