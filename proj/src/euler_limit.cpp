#include "sheath/euler_limit.hpp"

#include "sheath/errors.hpp"
#include "sheath/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sheath {

double limit_sound_speed(double ion_temp) {
    if (!(ion_temp >= 0.0)) throw std::invalid_argument("limit: ion temperature must be nonnegative");
    return std::sqrt(ion_temp + 1.0);
}

Flux limit_flux(Primitive left, Primitive right, double ion_temp, RiemannSolver solver) {
    return numerical_flux(left, right, limit_sound_speed(ion_temp), solver);
}

namespace {

void check_vacuum(std::span<const double> n, const Grid1D& grid, double t) {
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!(n[i] > kVacuumFloor)) {
            std::ostringstream os;
            os.precision(17);
            os << "vacuum formation at x=" << grid.center(static_cast<int>(i)) << ", t=" << t << ", n=" << n[i];
            throw SolverError(os.str());
        }
    }
}

}  // namespace

LimitStep step_limit(const FluidState& state, const Grid1D& grid, const BoundaryMode& bc, double ion_temp, double cfl,
                     double dt_max, RiemannSolver solver) {
    if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("limit: cfl must lie in (0, 1)");
    if (state.size() != static_cast<std::size_t>(grid.cells())) throw std::invalid_argument("limit: state/grid size mismatch");
    state.validate();
    const double c = limit_sound_speed(ion_temp);
    bc.validate(c);

    double speed = 0.0;
    for (double u : state.u) speed = std::max(speed, std::abs(u) + c);
    double dt = cfl * grid.min_width() / speed;
    if (dt_max > 0.0) dt = std::min(dt, dt_max);

    const std::size_t N = state.size();
    std::vector<double> n0 = state.n, m0(N);
    for (std::size_t i = 0; i < N; ++i) m0[i] = state.n[i] * state.u[i];

    FvRates r;
    hyperbolic_rates(grid, n0, m0, c, bc, solver, r);
    const double flux0 = r.wall_mass_flux;
    std::vector<double> n1(N), m1(N);
    for (std::size_t i = 0; i < N; ++i) {
        n1[i] = n0[i] + dt * r.dn[i];
        m1[i] = m0[i] + dt * r.dm[i];
    }
    check_vacuum(n1, grid, state.t);

    hyperbolic_rates(grid, n1, m1, c, bc, solver, r);
    LimitStep out;
    out.dt = dt;
    out.state.t = state.t + dt;
    out.state.n.resize(N);
    out.state.u.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double n = 0.5 * (n0[i] + n1[i] + dt * r.dn[i]);
        const double m = 0.5 * (m0[i] + m1[i] + dt * r.dm[i]);
        out.state.n[i] = n;
        out.state.u[i] = m / n;
    }
    check_vacuum(out.state.n, grid, out.state.t);
    out.outflow_mass = bc.kind == BoundaryKind::wall ? 0.0 : -0.5 * dt * (flux0 + r.wall_mass_flux);
    return out;
}

BoundaryTrace boundary_trace(const FluidState& state, const Grid1D& grid) {
    if (state.size() < 3 || state.size() != static_cast<std::size_t>(grid.cells())) {
        throw std::invalid_argument("boundary trace: state/grid size mismatch");
    }
    const double x0 = grid.center(0), x1 = grid.center(1), x2 = grid.center(2);
    BoundaryTrace tr;
    tr.gamma = numerics::parabola(x0, state.n[0], x1, state.n[1], x2, state.n[2], 0.0);
    tr.u_trace = numerics::parabola(x0, state.u[0], x1, state.u[1], x2, state.u[2], 0.0);
    if (!(tr.gamma > 0.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "boundary trace: extrapolated density " << tr.gamma << " is not positive";
        throw SolverError(os.str());
    }
    tr.phi_trace = -std::log(tr.gamma);
    return tr;
}

LimitRun run_limit(const FluidState& initial, const Grid1D& grid, const BoundaryMode& bc, double ion_temp,
                   const LimitRunOptions& options) {
    if (!(options.t_end > 0.0)) throw std::invalid_argument("limit: t_end must be positive");
    if (options.intervals < 1) throw std::invalid_argument("limit: need at least one sampling interval");
    LimitRun run{grid, bc, ion_temp, options.cfl, {}, 0.0, 0};
    FluidState s = initial;
    s.t = 0.0;
    s.validate();
    run.samples.push_back(s);
    for (int k = 1; k <= options.intervals; ++k) {
        const double target = options.t_end * k / options.intervals;
        while (target - s.t > 1e-14 * options.t_end) {
            LimitStep st = step_limit(s, grid, bc, ion_temp, options.cfl, target - s.t, options.solver);
            run.outflow_mass += st.outflow_mass;
            s = std::move(st.state);
            ++run.steps;
        }
        s.t = target;
        run.samples.push_back(s);
    }
    return run;
}

void write_state_csv(std::ostream& out, const FluidState& state, const Grid1D& grid) {
    out.precision(17);
    out << "x,n,u\n";
    for (std::size_t i = 0; i < state.size(); ++i) {
        out << grid.center(static_cast<int>(i)) << ',' << state.n[i] << ',' << state.u[i] << '\n';
    }
}

void write_limit_metadata(std::ostream& out, const LimitRun& run) {
    out.precision(17);
    out << "t_end=" << run.t_end() << '\n'
        << "cells=" << run.grid.cells() << '\n'
        << "cfl=" << run.cfl << '\n'
        << "bc=" << run.bc.name() << '\n';
    if (run.bc.kind == BoundaryKind::outflow) out << "u_b=" << run.bc.u_b << '\n';
    out << "ion_temp=" << run.ion_temp << '\n' << "steps=" << run.steps << '\n' << "outflow_mass=" << run.outflow_mass << '\n';
}

}  // namespace sheath
