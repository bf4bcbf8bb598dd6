#pragma once

#include "sheath/euler_poisson.hpp"
#include "sheath/expansion.hpp"
#include "sheath/grid.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sheath {

/// Relative entropy of a solution against an approximate density/velocity pair.
double relative_entropy(const FluidState& state, const PotentialField& field, std::span<const double> n_app,
                        std::span<const double> u_app, const PlasmaParams& params, const Grid1D& grid);

struct NormPair {
    double l2 = 0.0;
    double linf = 0.0;
};

/// Weighted L2 and max norms of a - b over the cells of `grid`.
NormPair discrete_norms(std::span<const double> a, std::span<const double> b, const Grid1D& grid);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int points = 0;
    std::vector<std::string> warnings; ///< dropped points
};

/// Least-squares line through (ln eps, ln error). Points with error below 1e-14
/// are dropped with a warning; fewer than three remaining points is an error.
RateFit fit_rate(std::span<const std::pair<double, double>> points);

struct ErrorRecord {
    double epsilon = 0.0;
    double l2_n_vs_limit = 0.0;
    double l2_u_vs_limit = 0.0;
    double linf_n_vs_bundle = 0.0;
    double linf_phi_vs_bundle = 0.0;
    double entropy_sup = 0.0;
    double entropy_min = 0.0; ///< smallest sampled relative entropy (nonnegativity check)
    double energy_drift = 0.0;
    long steps = 0;
    int cells = 0;
};

/// Mesh for one epsilon: geometric toward the wall, then uniform.
struct StudyGrid {
    double first_cell_fraction = 1.0 / 64.0; ///< first cell width / epsilon
    double ratio = 1.05;
    double interior_width = 1e-3;
};

struct StudyConfig {
    PlasmaParams base;                 ///< epsilon is overwritten per run
    std::vector<double> eps_list = {0.04, 0.02, 0.01, 0.005};
    double t_end = 0.2;
    int samples = 20;                  ///< error sampling times j t_end / samples, j = 0..samples
    FluidState initial;                ///< limit initial data on `limit_grid`
    Grid1D limit_grid = Grid1D::uniform(1.0, 2000);
    int limit_substeps = 20;           ///< stored limit times per sampling interval
    int order = 1;                     ///< expansion order of the well-prepared data
    StudyGrid grid;
    double cfl = 0.4;
    int jobs = 1;
};

struct StudyResult {
    std::vector<ErrorRecord> records; ///< sorted by epsilon, descending
    std::vector<std::pair<std::string, RateFit>> fits;
    bool complete = true;
    std::string failure;
};

Grid1D study_grid(const StudyGrid& spec, double epsilon, double length);

/// Error columns of a study in CSV order.
std::vector<std::string> study_columns();
double study_value(const ErrorRecord& r, const std::string& column);

/// Runs the limit problem once, builds the expansion, then one full run per epsilon.
StudyResult run_convergence_study(const StudyConfig& config);

/// Per-epsilon part of the study against a prebuilt bundle.
ErrorRecord study_single(const StudyConfig& config, const ExpansionBundle& bundle, double epsilon);

/// `epsilon,l2_n,l2_u,linf_n_bl,linf_phi_bl,entropy_sup`
void write_study_csv(std::ostream& out, const StudyResult& result);
/// `column,slope,intercept,r2`
void write_fits_csv(std::ostream& out, const StudyResult& result);

}  // namespace sheath
