#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sheath::numerics {

/// Solves a tridiagonal system with the Thomas algorithm.
/// `lower[0]` and `upper[n-1]` are ignored. Throws SolverError on a zero pivot.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

/// e^x - 1 - x without cancellation for small |x|.
double expm1_minus_x(double x);

/// Result of one adaptive integration between two abscissae.
struct OdeStats {
    int accepted = 0;
    int rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) integration of the scalar autonomous-or-not ODE
/// y' = f(z, y) from z0 to z1. Local error per step is held below
/// atol + rtol*|y|. `h` carries the step-size suggestion between calls.
double integrate_dopri5(const std::function<double(double, double)>& f, double z0, double z1, double y0,
                        double atol, double rtol, double& h, OdeStats* stats = nullptr);

/// Cubic Hermite interpolation on a tabulation with values and slopes.
/// Abscissae must be strictly increasing; x outside the table is clamped.
double hermite(std::span<const double> xs, std::span<const double> ys, std::span<const double> dys, double x);

/// Piecewise-linear interpolation (clamped).
double linear(std::span<const double> xs, std::span<const double> ys, double x);

/// Value at x of the parabola through three points.
double parabola(double x0, double y0, double x1, double y1, double x2, double y2, double x);

/// Second-order finite-difference derivative of tabulated data on a
/// (possibly nonuniform) abscissa; one-sided three-point formulas at the ends.
std::vector<double> derivative(std::span<const double> xs, std::span<const double> ys);

/// Cumulative trapezoid integral, starting at 0 at xs[0].
std::vector<double> cumulative_trapezoid(std::span<const double> xs, std::span<const double> ys);

}  // namespace sheath::numerics
