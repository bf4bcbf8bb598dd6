#pragma once

#include "sheath/finite_volume.hpp"
#include "sheath/grid.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sheath {

/// Isothermal Euler system with pressure (T + 1) n, the quasineutral limit.
double limit_sound_speed(double ion_temp);

Flux limit_flux(Primitive left, Primitive right, double ion_temp, RiemannSolver solver = RiemannSolver::hll);

struct LimitStep {
    FluidState state;
    double dt = 0.0;
    double outflow_mass = 0.0; ///< mass that left through x = 0 during the step
};

/// One SSP-RK2 step with dt = cfl * min(width) / max(|u| + c), capped at `dt_max`.
LimitStep step_limit(const FluidState& state, const Grid1D& grid, const BoundaryMode& bc, double ion_temp, double cfl,
                     double dt_max = 0.0, RiemannSolver solver = RiemannSolver::hll);

/// Wall values of the limit solution: gamma = n(0), u(0) and phi0(0) = -ln gamma.
struct BoundaryTrace {
    double gamma = 1.0;
    double u_trace = 0.0;
    double phi_trace = 0.0;
};

/// Quadratic extrapolation to x = 0 through the first three cell centers.
BoundaryTrace boundary_trace(const FluidState& state, const Grid1D& grid);

/// Time-sampled limit solution on a fixed grid.
struct LimitRun {
    Grid1D grid;
    BoundaryMode bc;
    double ion_temp = 1.0;
    double cfl = 0.4;
    std::vector<FluidState> samples; ///< samples[k] at t = k * t_end / (samples.size() - 1)
    double outflow_mass = 0.0;       ///< cumulative mass through x = 0
    long steps = 0;

    double t_end() const { return samples.back().t; }
};

struct LimitRunOptions {
    double cfl = 0.4;
    double t_end = 0.2;
    int intervals = 20; ///< number of sampling intervals (samples = intervals + 1)
    RiemannSolver solver = RiemannSolver::hll;
};

LimitRun run_limit(const FluidState& initial, const Grid1D& grid, const BoundaryMode& bc, double ion_temp,
                   const LimitRunOptions& options);

/// Cell-wise snapshot `x,n,u`.
void write_state_csv(std::ostream& out, const FluidState& state, const Grid1D& grid);

/// Key/value sidecar for a limit run.
void write_limit_metadata(std::ostream& out, const LimitRun& run);

}  // namespace sheath
