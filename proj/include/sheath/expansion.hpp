#pragma once

#include "sheath/euler_limit.hpp"
#include "sheath/euler_poisson.hpp"
#include "sheath/grid.hpp"
#include "sheath/profiles.hpp"

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace sheath {

/// Layer tabulations at one stored time, on the bundle's common z grid.
struct LayerSlice {
    double t = 0.0;
    double gamma = 1.0;       ///< wall density of the limit solution
    double u_slope = 0.0;     ///< wall derivative of the limit velocity
    double n1_trace = 0.0;    ///< wall value of the first interior corrector density
    double u1_trace = 0.0;    ///< imposed wall value of the first interior corrector velocity
    double layer_mass = 0.0;  ///< integral of N^0 over z
    std::vector<double> phi0, dphi0, n0, dn0;  ///< Phi^0, N^0 and z-derivatives
    std::vector<double> phi1, dphi1, n1, dn1;  ///< Phi^1, N^1 (order 1 only)
    std::vector<double> u1, du1;               ///< U^1 layer part (order 1 only)
};

/// Immutable, epsilon-independent part of the two-scale expansion.
struct ExpansionData {
    int order = 0;
    double ion_temp = 1.0;
    double wall_potential = 0.0;
    Grid1D grid = Grid1D::uniform(1.0, 16);
    std::vector<double> times;
    std::vector<FluidState> interior0;          ///< (n^0, u^0) per time
    std::vector<std::vector<double>> n1, u1;    ///< first interior correctors per time (order 1)
    std::vector<double> z;                      ///< common layer grid
    std::vector<LayerSlice> layers;
};

/// Two-scale approximate solution; copies share the tabulations.
struct ExpansionBundle {
    int order = 0;
    double epsilon = 0.05;
    std::shared_ptr<const ExpansionData> data;

    double t_begin() const { return data->times.front(); }
    double t_end() const { return data->times.back(); }
    /// Same tabulations evaluated at another epsilon.
    ExpansionBundle with_epsilon(double eps) const;
    /// Same tabulations truncated to a lower order.
    ExpansionBundle with_order(int k) const;
};

/// First interior corrector: the limit system linearized around a stored run,
/// zero initial data, wall velocity given per stored time (linear in between).
struct LinearizedSolution {
    std::vector<std::vector<double>> n1, u1; ///< per stored time, per cell
};
LinearizedSolution solve_linearized_limit(const LimitRun& run, std::span<const double> wall_velocity);

/// Builds the order-0 (and optionally order-1) expansion over a wall-bounded limit run.
/// Only `ion_temp`, `epsilon` and `wall_potential` of `params` are read.
ExpansionBundle build_expansion(const LimitRun& limit_run, const PlasmaParams& params, int order);

/// Approximate fields at given points; the layer parts are reported separately.
struct ApproxFields {
    std::vector<double> n, u, phi;
    std::vector<double> n_layer, u_layer, phi_layer;
};

ApproxFields evaluate_at(const ExpansionBundle& bundle, double t, std::span<const double> xs);
/// Cell-center evaluation.
ApproxFields evaluate(const ExpansionBundle& bundle, double t, const Grid1D& grid);

/// Interior (limit) part n^0, u^0 at the given points.
FluidState interior_at(const ExpansionBundle& bundle, double t, std::span<const double> xs);

struct ResidualReport {
    double r_n_norm = 0.0;
    double r_u_norm = 0.0;
    double r_phi_norm = 0.0;
    double epsilon = 0.0;
};

/// Discrete Euler-Poisson residual of the evaluated bundle at time t, using a
/// centered time difference with step equal to the stored time spacing.
ResidualReport residual(const ExpansionBundle& bundle, const PlasmaParams& params, const Grid1D& grid, double t);

/// `x,n_a,u_a,phi_a,n_layer_part,phi_layer_part` per cell at time t.
void write_bundle_csv(std::ostream& out, const ExpansionBundle& bundle, double t, const Grid1D& grid);

}  // namespace sheath
