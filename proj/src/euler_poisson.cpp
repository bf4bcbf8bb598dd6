#include "sheath/euler_poisson.hpp"

#include "sheath/errors.hpp"
#include "sheath/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sheath {

double PlasmaParams::sound_speed() const { return std::sqrt(ion_temp); }

void PlasmaParams::validate() const {
    if (!(ion_temp > 0.0) || !std::isfinite(ion_temp)) throw std::invalid_argument("ion_temp: must be positive");
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon: must be in (0,1]");
    if (!std::isfinite(wall_potential)) throw std::invalid_argument("wall_potential: must be finite");
    if (!(domain_length >= 20.0 * epsilon) || !std::isfinite(domain_length)) {
        throw std::invalid_argument("domain_length: must be at least 20*epsilon");
    }
    bc.validate(sound_speed());
}

namespace {

struct Stencil {
    std::vector<double> lo, di, up; // eps^2 * second-difference weights at each center
    double max_weight = 0.0;
};

Stencil laplacian(const Grid1D& grid, double eps) {
    const auto x = grid.nodes();
    const std::size_t N = static_cast<std::size_t>(grid.cells());
    Stencil s;
    s.lo.resize(N);
    s.di.resize(N);
    s.up.resize(N);
    const double e2 = eps * eps;
    for (std::size_t i = 0; i < N; ++i) {
        const double hl = x[i + 1] - x[i], hr = x[i + 2] - x[i + 1];
        const double a = 2.0 / (hl * (hl + hr)), b = 2.0 / (hr * (hl + hr));
        s.lo[i] = e2 * a;
        s.up[i] = e2 * b;
        s.di[i] = -e2 * (a + b);
        s.max_weight = std::max(s.max_weight, e2 * (a + b));
    }
    return s;
}

void residual(const Stencil& s, std::span<const double> phi, std::span<const double> n, std::vector<double>& r) {
    const std::size_t N = n.size();
    r.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        r[i] = s.lo[i] * phi[i] + s.di[i] * phi[i + 1] + s.up[i] * phi[i + 2] + std::exp(-phi[i + 1]) - n[i];
    }
}

double l2(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return std::sqrt(s);
}

double max_abs(const std::vector<double>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

PotentialField solve_poisson(std::span<const double> n, const PlasmaParams& params, const Grid1D& grid,
                             std::span<const double> warm_start, const PoissonOptions& options) {
    const std::size_t N = static_cast<std::size_t>(grid.cells());
    if (n.size() != N) throw std::invalid_argument("poisson: density/grid size mismatch");
    double n_max = 0.0;
    for (double v : n) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("poisson: density must be positive");
        n_max = std::max(n_max, v);
    }
    const Stencil st = laplacian(grid, params.epsilon);

    std::vector<double> phi(N + 2);
    if (!warm_start.empty()) {
        if (warm_start.size() != N + 2) throw std::invalid_argument("poisson: warm start has wrong size");
        std::copy(warm_start.begin(), warm_start.end(), phi.begin());
    } else {
        for (std::size_t i = 0; i < N; ++i) phi[i + 1] = -std::log(n[i]);
    }
    phi[0] = params.wall_potential;
    phi[N + 1] = -std::log(n[N - 1]);

    PotentialField out;
    std::vector<double> r, trial(N + 2), rt, lo(N), di(N), up(N), rhs(N);
    residual(st, phi, n, r);
    double norm = l2(r);
    out.residual_norms.push_back(norm);

    auto tolerance = [&]() {
        // round-off floor of the discrete operator on the current iterate
        double phi_max = 0.0;
        for (double v : phi) phi_max = std::max(phi_max, std::abs(v));
        const double eps = std::numeric_limits<double>::epsilon();
        return options.tolerance * std::max(1.0, n_max) + 8.0 * eps * (2.0 * st.max_weight * phi_max + n_max);
    };

    int it = 0;
    while (max_abs(r) > tolerance()) {
        if (it == options.max_iterations) {
            std::ostringstream os;
            os.precision(6);
            os << "poisson: Newton did not converge in " << options.max_iterations << " iterations (residual "
               << max_abs(r) << ")";
            throw SolverError(os.str());
        }
        for (std::size_t i = 0; i < N; ++i) {
            lo[i] = st.lo[i];
            up[i] = st.up[i];
            di[i] = st.di[i] - std::exp(-phi[i + 1]);
            rhs[i] = -r[i];
        }
        const std::vector<double> delta = numerics::solve_tridiagonal(lo, di, up, rhs);
        double alpha = 1.0, trial_norm = norm;
        bool accepted = false;
        for (int k = 0; k < 40; ++k, alpha *= 0.5) {
            trial = phi;
            for (std::size_t i = 0; i < N; ++i) trial[i + 1] += alpha * delta[i];
            residual(st, trial, n, rt);
            trial_norm = l2(rt);
            if (std::isfinite(trial_norm) && trial_norm < norm) {
                accepted = true;
                break;
            }
        }
        ++it;
        if (!accepted) {
            std::ostringstream os;
            os.precision(6);
            os << "poisson: line search stalled at residual " << max_abs(r);
            throw SolverError(os.str());
        }
        phi.swap(trial);
        r.swap(rt);
        norm = trial_norm;
        out.residual_norms.push_back(norm);
    }
    out.iterations = it;
    out.newton_residual = max_abs(r);
    out.dphi = numerics::derivative(grid.nodes(), phi);
    out.phi = std::move(phi);
    return out;
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

void full_rates(const Grid1D& grid, std::span<const double> n, std::span<const double> m, const PotentialField& f,
                const PlasmaParams& p, RiemannSolver solver, FvRates& r) {
    hyperbolic_rates(grid, n, m, p.sound_speed(), p.bc, solver, r);
    for (std::size_t i = 0; i < n.size(); ++i) r.dm[i] += n[i] * f.dphi[i + 1];
}

}  // namespace

FullStep step_full(const FluidState& state, const PotentialField& field, const PlasmaParams& params, const Grid1D& grid,
                   double cfl, double dt_max, RiemannSolver solver) {
    if (!(cfl > 0.0 && cfl < 1.0)) throw std::invalid_argument("full: cfl must lie in (0, 1)");
    const std::size_t N = static_cast<std::size_t>(grid.cells());
    if (state.size() != N || field.phi.size() != N + 2 || field.dphi.size() != N + 2) {
        throw std::invalid_argument("full: state/field/grid size mismatch");
    }
    state.validate();
    const double c = params.sound_speed();

    double speed = 0.0;
    for (double u : state.u) speed = std::max(speed, std::abs(u) + c);
    double dt = cfl * grid.min_width() / speed;
    if (dt_max > 0.0) dt = std::min(dt, dt_max);

    std::vector<double> n0 = state.n, m0(N);
    for (std::size_t i = 0; i < N; ++i) m0[i] = state.n[i] * state.u[i];

    FvRates r;
    full_rates(grid, n0, m0, field, params, solver, r);
    const double flux0 = r.wall_mass_flux;
    std::vector<double> n1(N), m1(N);
    for (std::size_t i = 0; i < N; ++i) {
        n1[i] = n0[i] + dt * r.dn[i];
        m1[i] = m0[i] + dt * r.dm[i];
    }
    check_vacuum(n1, grid, state.t);
    const PotentialField f1 = solve_poisson(n1, params, grid, field.phi);

    full_rates(grid, n1, m1, f1, params, solver, r);
    FullStep out;
    out.dt = dt;
    out.state.t = state.t + dt;
    out.state.n.resize(N);
    out.state.u.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double n = 0.5 * (n0[i] + n1[i] + dt * r.dn[i]);
        out.state.n[i] = n;
        out.state.u[i] = 0.5 * (m0[i] + m1[i] + dt * r.dm[i]) / n;
    }
    check_vacuum(out.state.n, grid, out.state.t);
    out.field = solve_poisson(out.state.n, params, grid, f1.phi);
    out.outflow_mass = params.bc.kind == BoundaryKind::wall ? 0.0 : -0.5 * dt * (flux0 + r.wall_mass_flux);

    const double limit = 0.5 * std::sqrt(3.0 * params.ion_temp);
    const double near = std::min(grid.length(), 5.0 * params.epsilon);
    for (std::size_t i = 0; i < N && grid.center(static_cast<int>(i)) < near; ++i) {
        if (std::abs(out.state.u[i]) > limit) out.velocity_warning = true;
    }
    return out;
}

EnergyReport energy_functional(const FluidState& state, const PotentialField& field, const PlasmaParams& params,
                               const Grid1D& grid) {
    EnergyReport e;
    const double e2 = params.epsilon * params.epsilon;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double w = grid.width(static_cast<int>(i));
        const double n = state.n[i], u = state.u[i], phi = field.phi[i + 1], d = field.dphi[i + 1];
        e.kinetic += 0.5 * n * u * u * w;
        e.ion_entropy += params.ion_temp * n * (std::log(n) - 1.0) * w;
        e.electron_term += -(1.0 + phi) * std::exp(-phi) * w;
        e.field_term += 0.5 * e2 * d * d * w;
    }
    e.total = e.kinetic + e.ion_entropy + e.electron_term + e.field_term;
    return e;
}

double quasineutrality_residual(const FluidState& state, const PotentialField& field, const Grid1D& grid,
                                double exclusion) {
    if (!(exclusion >= 0.0)) throw std::invalid_argument("quasineutrality: exclusion must be nonnegative");
    double worst = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (grid.center(static_cast<int>(i)) <= exclusion) continue;
        worst = std::max(worst, std::abs(state.n[i] - std::exp(-field.phi[i + 1])));
    }
    return worst;
}

FullRun run_full(const FluidState& initial, const PlasmaParams& params, const Grid1D& grid,
                 const FullRunOptions& options, const StepObserver& observer) {
    params.validate();
    if (std::abs(grid.length() - params.domain_length) > 1e-12 * params.domain_length) {
        throw std::invalid_argument("full: grid length differs from domain_length");
    }
    if (!(options.t_end > 0.0)) throw std::invalid_argument("full: t_end must be positive");
    if (options.intervals < 1) throw std::invalid_argument("full: need at least one sampling interval");
    FluidState s = initial;
    s.t = 0.0;
    s.validate();
    PotentialField f = solve_poisson(s.n, params, grid);
    FullRun run;
    run.samples.push_back({s, f, energy_functional(s, f, params, grid)});
    double mass = s.mass(grid);
    for (int k = 1; k <= options.intervals; ++k) {
        const double target = options.t_end * k / options.intervals;
        while (target - s.t > 1e-14 * options.t_end) {
            FullStep st = step_full(s, f, params, grid, options.cfl, target - s.t, options.solver);
            const double new_mass = st.state.mass(grid);
            run.step_mass_defect.push_back(std::abs(new_mass - mass + st.outflow_mass));
            if (new_mass > mass) run.mass_monotone = false;
            mass = new_mass;
            run.outflow_mass += st.outflow_mass;
            run.velocity_warning = run.velocity_warning || st.velocity_warning;
            ++run.steps;
            if (observer) observer(st);
            s = std::move(st.state);
            f = std::move(st.field);
        }
        s.t = target;
        run.samples.push_back({s, f, energy_functional(s, f, params, grid)});
    }
    return run;
}

void write_full_csv(std::ostream& out, const FluidState& state, const PotentialField& field, const Grid1D& grid) {
    out.precision(17);
    out << "x,n,u,phi,dphi,e_minus_phi\n";
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double phi = field.phi[i + 1];
        out << grid.center(static_cast<int>(i)) << ',' << state.n[i] << ',' << state.u[i] << ',' << phi << ','
            << field.dphi[i + 1] << ',' << std::exp(-phi) << '\n';
    }
}

void write_energy_csv(std::ostream& out, const FullRun& run) {
    out.precision(17);
    out << "t,kinetic,ion_entropy,electron_term,field_term,total\n";
    for (const auto& s : run.samples) {
        const EnergyReport& e = s.energy;
        out << s.state.t << ',' << e.kinetic << ',' << e.ion_entropy << ',' << e.electron_term << ',' << e.field_term
            << ',' << e.total << '\n';
    }
}

}  // namespace sheath
