#pragma once

#include "sheath/grid.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sheath {

/// Primitive isothermal state.
struct Primitive {
    double n = 1.0;
    double u = 0.0;
};

struct Flux {
    double mass = 0.0;
    double momentum = 0.0;
};

enum class RiemannSolver { hll, exact };

enum class BoundaryKind { wall, outflow };

/// Condition at x = 0. The far end x = L is always a reflecting wall.
struct BoundaryMode {
    BoundaryKind kind = BoundaryKind::wall;
    double u_b = 0.0; ///< outflow velocity, only read for BoundaryKind::outflow

    /// Outflow must be subsonic: -sound_speed < u_b < 0.
    void validate(double sound_speed) const;
    std::string name() const { return kind == BoundaryKind::wall ? "wall" : "outflow"; }
};

/// Cell-averaged ion density and velocity at one time level.
struct FluidState {
    std::vector<double> n;
    std::vector<double> u;
    double t = 0.0;

    std::size_t size() const { return n.size(); }
    /// Throws std::invalid_argument on size mismatch, nonpositive density or non-finite values.
    void validate() const;
    double mass(const Grid1D& grid) const;
};

/// Isothermal flux n u, n u^2 + c^2 n.
Flux physical_flux(Primitive s, double sound_speed);

/// HLL wave-speed bounds min(u - c), max(u + c) over both states.
std::pair<double, double> hll_wave_speeds(Primitive left, Primitive right, double sound_speed);

Flux hll_flux(Primitive left, Primitive right, double sound_speed);

/// Exact isothermal Riemann solution sampled at x/t = 0.
Primitive exact_riemann_state(Primitive left, Primitive right, double sound_speed);
Flux exact_flux(Primitive left, Primitive right, double sound_speed);

Flux numerical_flux(Primitive left, Primitive right, double sound_speed, RiemannSolver solver);

/// Semi-discrete rates of the conservative variables (n, m = n u).
struct FvRates {
    std::vector<double> dn;
    std::vector<double> dm;
    double wall_mass_flux = 0.0; ///< numerical mass flux through x = 0 (positive = toward +x)
};

/// MUSCL (minmod, primitive variables) + Riemann flux divergence for isothermal Euler
/// with sound speed c. Ghost cells: mirrored for walls, (n_1, u_b) for outflow.
void hyperbolic_rates(const Grid1D& grid, std::span<const double> n, std::span<const double> m, double sound_speed,
                      const BoundaryMode& left, RiemannSolver solver, FvRates& out);

/// Density floor below which a run aborts.
inline constexpr double kVacuumFloor = 1e-12;

std::string describe_state(Primitive s);

}  // namespace sheath
