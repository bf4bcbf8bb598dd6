#pragma once

#include "sheath/finite_volume.hpp"
#include "sheath/grid.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace sheath {

struct PlasmaParams {
    double ion_temp = 1.0;
    double epsilon = 0.05;
    double wall_potential = 0.0;
    BoundaryMode bc;
    double domain_length = 1.0;

    /// Ion sound speed sqrt(T); the electron pressure acts through the potential.
    double sound_speed() const;
    /// epsilon in (0, 1], L >= 20 epsilon, T > 0, subsonic outflow window.
    void validate() const;
};

/// Potential on the node set {0, cell centers, L} of the grid.
struct PotentialField {
    std::vector<double> phi;
    std::vector<double> dphi;
    double newton_residual = 0.0;       ///< final max-norm residual
    int iterations = 0;
    std::vector<double> residual_norms; ///< L2 residual before each Newton step and at the end
};

struct PoissonOptions {
    double tolerance = 1e-10; ///< scaled by max(1, max n)
    int max_iterations = 50;
};

/// Damped Newton solve of eps^2 phi'' + e^{-phi} = n with phi(0) = phi_b, phi(L) = -ln n_last.
/// `warm_start` (node values) replaces the default initial guess -ln n.
PotentialField solve_poisson(std::span<const double> n, const PlasmaParams& params, const Grid1D& grid,
                             std::span<const double> warm_start = {}, const PoissonOptions& options = {});

struct FullStep {
    FluidState state;
    PotentialField field;
    double dt = 0.0;
    double outflow_mass = 0.0;   ///< mass that left through x = 0 during the step
    bool velocity_warning = false; ///< near-wall |u| exceeded sqrt(3 T)/2
};

/// One SSP-RK2 step of the ion Euler equations with electric source n dphi,
/// re-solving the potential after each stage. `field` must belong to `state`.
FullStep step_full(const FluidState& state, const PotentialField& field, const PlasmaParams& params, const Grid1D& grid,
                   double cfl, double dt_max = 0.0, RiemannSolver solver = RiemannSolver::hll);

struct EnergyReport {
    double kinetic = 0.0;
    double ion_entropy = 0.0;
    double electron_term = 0.0;
    double field_term = 0.0;
    double total = 0.0;
};

/// Midpoint quadrature of the conserved energy. The electron part is
/// -(1 + phi) e^{-phi}, the Boltzmann-electron entropy that the dynamics conserve.
EnergyReport energy_functional(const FluidState& state, const PotentialField& field, const PlasmaParams& params,
                               const Grid1D& grid);

/// max |n - e^{-phi}| over cells with center x > exclusion.
double quasineutrality_residual(const FluidState& state, const PotentialField& field, const Grid1D& grid,
                                double exclusion);

/// Time-sampled full-system run.
struct FullRunOptions {
    double cfl = 0.4;
    double t_end = 0.2;
    int intervals = 20;
    RiemannSolver solver = RiemannSolver::hll;
};

struct FullSample {
    FluidState state;
    PotentialField field;
    EnergyReport energy;
};

struct FullRun {
    std::vector<FullSample> samples;
    std::vector<double> step_mass_defect; ///< per step: |mass change + outflow| (only when recorded)
    double outflow_mass = 0.0;
    long steps = 0;
    bool velocity_warning = false;
    bool mass_monotone = true; ///< mass never increased across a step
};

/// Observer called after every accepted step (may be empty).
using StepObserver = std::function<void(const FullStep&)>;

FullRun run_full(const FluidState& initial, const PlasmaParams& params, const Grid1D& grid,
                 const FullRunOptions& options, const StepObserver& observer = {});

/// `x,n,u,phi,dphi,e_minus_phi` per cell.
void write_full_csv(std::ostream& out, const FluidState& state, const PotentialField& field, const Grid1D& grid);
/// `t,kinetic,ion_entropy,electron_term,field_term,total` per sample.
void write_energy_csv(std::ostream& out, const FullRun& run);

}  // namespace sheath
