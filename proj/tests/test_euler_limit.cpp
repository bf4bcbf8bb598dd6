#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sheath/errors.hpp"
#include "sheath/euler_limit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

using namespace sheath;

namespace {

FluidState constant(int cells, double n, double u) {
    FluidState s;
    s.n.assign(static_cast<std::size_t>(cells), n);
    s.u.assign(static_cast<std::size_t>(cells), u);
    return s;
}

template <class F>
FluidState sampled(const Grid1D& g, F&& nu) {
    FluidState s;
    for (double x : g.centers()) {
        const auto [n, u] = nu(x);
        s.n.push_back(n);
        s.u.push_back(u);
    }
    return s;
}

FluidState advance(FluidState s, const Grid1D& g, const BoundaryMode& bc, double ion_temp, double t_end,
                   double cfl = 0.4, RiemannSolver solver = RiemannSolver::hll) {
    LimitRunOptions o;
    o.t_end = t_end;
    o.intervals = 1;
    o.cfl = cfl;
    o.solver = solver;
    return run_limit(s, g, bc, ion_temp, o).samples.back();
}

}  // namespace

TEST_CASE("flux consistency on a constant state") {
    const Flux f = limit_flux({1.0, 0.0}, {1.0, 0.0}, 1.0);
    CHECK(f.mass == 0.0);
    CHECK(f.momentum == doctest::Approx(2.0).epsilon(1e-15));
    for (double u : {-0.7, 0.3, 2.5}) {
        for (auto solver : {RiemannSolver::hll, RiemannSolver::exact}) {
            const Flux g = limit_flux({1.3, u}, {1.3, u}, 0.5, solver);
            CHECK(g.mass == doctest::Approx(1.3 * u).epsilon(1e-14));
            CHECK(g.momentum == doctest::Approx(1.3 * u * u + 1.5 * 1.3).epsilon(1e-14));
        }
    }
}

TEST_CASE("wave-speed bounds contain both characteristic fans") {
    const double c = limit_sound_speed(1.0);
    const auto [sl, sr] = hll_wave_speeds({1.0, 0.2}, {0.5, -0.4}, c);
    for (double u : {0.2, -0.4}) {
        CHECK(sl <= u - c);
        CHECK(sr >= u + c);
    }
}

TEST_CASE("dam break: exact Riemann flux matches independent oracle") {
    const auto [ns, us] = oracle::isothermal_riemann_at_zero(2.0, 0.0, 1.0, 0.0, 1.0);
    const Primitive s = exact_riemann_state({2.0, 0.0}, {1.0, 0.0}, 1.0);
    CHECK(s.n == doctest::Approx(ns).epsilon(1e-10));
    CHECK(s.u == doctest::Approx(us).epsilon(1e-10));
    const Flux f = limit_flux({2.0, 0.0}, {1.0, 0.0}, 0.0, RiemannSolver::exact);
    CHECK(f.mass == doctest::Approx(ns * us).epsilon(1e-10));
    // transonic fans and strong shocks also agree
    const double cases[][4] = {{1.0, 2.0, 0.2, 0.1}, {1.0, -1.5, 1.0, 1.5}, {0.3, 0.4, 3.0, -2.0}, {1.0, 1.8, 0.5, 1.9}};
    for (const auto& q : cases) {
        const auto [on, ou] = oracle::isothermal_riemann_at_zero(q[0], q[1], q[2], q[3], 1.0);
        const Primitive e = exact_riemann_state({q[0], q[1]}, {q[2], q[3]}, 1.0);
        CHECK(e.n == doctest::Approx(on).epsilon(1e-9));
        CHECK(e.u == doctest::Approx(ou).epsilon(1e-9));
    }
}

TEST_CASE("dam break: HLL scheme interface density converges to exact value") {
    const auto [ns, us] = oracle::isothermal_riemann_at_zero(2.0, 0.0, 1.0, 0.0, 1.0);
    const Grid1D g = Grid1D::uniform(2.0, 800);
    const FluidState s0 = sampled(g, [](double x) { return std::pair{x < 1.0 ? 2.0 : 1.0, 0.0}; });
    const FluidState s = advance(s0, g, BoundaryMode{}, 0.0, 0.4);
    // the self-similar state at x/t = 0 sits at the initial discontinuity
    const double interface = 0.5 * (s.n[399] + s.n[400]);
    CHECK(interface == doctest::Approx(ns).epsilon(5e-3));
    CHECK(0.5 * (s.u[399] + s.u[400]) == doctest::Approx(us).epsilon(1e-2));
}

TEST_CASE("constant states are steady") {
    const Grid1D g = Grid1D::uniform(1.0, 64);
    const FluidState s = advance(constant(64, 1.0, 0.0), g, BoundaryMode{}, 1.0, 0.3);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s.n[i] == 1.0);
        CHECK(s.u[i] == 0.0);
    }
    // outflow with matching velocity: untouched away from the far wall
    const BoundaryMode out{BoundaryKind::outflow, -0.5};
    const FluidState o = advance(constant(64, 1.0, -0.5), g, out, 1.0, 0.1);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(o.n[i] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(o.u[i] == doctest::Approx(-0.5).epsilon(1e-14));
    }
}

TEST_CASE("smooth pulse self-convergence is second order") {
    auto pulse = [](double x) { return std::pair{1.0 + 0.2 * std::exp(-std::pow((x - 0.5) / 0.06, 2)), 0.0}; };
    std::vector<FluidState> sol;
    std::vector<Grid1D> grids;
    for (int cells : {200, 400, 800, 1600}) {
        grids.push_back(Grid1D::uniform(1.0, cells));
        sol.push_back(advance(sampled(grids.back(), pulse), grids.back(), BoundaryMode{}, 1.0, 0.1, 0.4));
    }
    std::vector<double> diff;
    for (std::size_t k = 0; k + 1 < sol.size(); ++k) {
        double e = 0.0;
        const double h = grids[k].width(0);
        for (std::size_t i = 0; i < sol[k].size(); ++i) {
            const double fine = 0.5 * (sol[k + 1].n[2 * i] + sol[k + 1].n[2 * i + 1]);
            e += std::abs(sol[k].n[i] - fine) * h;
        }
        diff.push_back(e);
    }
    for (std::size_t k = 0; k + 1 < diff.size(); ++k) {
        const double order = std::log2(diff[k] / diff[k + 1]);
        MESSAGE("L1 self-convergence order " << order);
        CHECK(order >= 1.8);
    }
}

TEST_CASE("acoustic pulse travels at sqrt(T + 1)") {
    const Grid1D g = Grid1D::uniform(4.0, 2000);
    const double x0 = 1.5, t = 1.0;
    const FluidState s0 = sampled(g, [&](double x) { return std::pair{1.0 + 1e-6 * std::exp(-std::pow((x - x0) / 0.1, 2)), 0.0}; });
    const FluidState s = advance(s0, g, BoundaryMode{}, 1.0, t);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
        const double x = g.center(i);
        if (x <= x0) continue;
        const double w = s.n[static_cast<std::size_t>(i)] - 1.0;
        num += w * x;
        den += w;
    }
    const double speed = (num / den - x0) / t;
    CHECK(speed == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
}

TEST_CASE("wall mass is conserved to round-off") {
    const Grid1D g = Grid1D::geometric(1.0, 1e-3, 1.1, 0.01);
    const FluidState s0 = sampled(g, [](double x) {
        return std::pair{1.0 + 0.3 * std::sin(3.0 * x), 0.4 * std::sin(std::acos(-1.0) * x) * (x > 0.1 ? 1.0 : 0.0)};
    });
    LimitRunOptions o;
    o.t_end = 0.5;
    o.intervals = 5;
    const LimitRun run = run_limit(s0, g, BoundaryMode{}, 1.0, o);
    const double m0 = run.samples.front().mass(g);
    CHECK(run.steps > 100);
    for (const auto& s : run.samples) CHECK(std::abs(s.mass(g) - m0) <= 1e-13 * m0);
}

TEST_CASE("outflow mass bookkeeping") {
    const Grid1D g = Grid1D::uniform(1.0, 200);
    const BoundaryMode bc{BoundaryKind::outflow, -0.8};
    const FluidState s0 = sampled(g, [](double x) { return std::pair{1.0 + 0.1 * x, -0.8 * (1.0 - x)}; });
    LimitRunOptions o;
    o.t_end = 0.3;
    o.intervals = 3;
    const LimitRun run = run_limit(s0, g, bc, 1.0, o);
    CHECK(run.outflow_mass > 0.0);
    CHECK(run.samples.back().mass(g) + run.outflow_mass == doctest::Approx(s0.mass(g)).epsilon(1e-13));
}

TEST_CASE("mirror symmetry between two walls") {
    const Grid1D g = Grid1D::uniform(2.0, 256);
    const FluidState s0 = sampled(g, [](double x) {
        const double d = x - 1.0;
        return std::pair{1.0 + 0.4 * std::exp(-d * d / 0.02) + 0.3 * std::cos(std::acos(-1.0) * x),
                         -0.5 * d * std::exp(-d * d / 0.05)};
    });
    const FluidState s = advance(s0, g, BoundaryMode{}, 1.0, 0.6);
    const std::size_t N = s.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        worst = std::max(worst, std::abs(s.n[i] - s.n[N - 1 - i]));
        worst = std::max(worst, std::abs(s.u[i] + s.u[N - 1 - i]));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("vacuum formation aborts") {
    const Grid1D g = Grid1D::uniform(1.0, 64);
    const FluidState s0 = constant(64, 1.0, 200.0);
    CHECK_THROWS_AS(advance(s0, g, BoundaryMode{}, 0.0, 0.05), SolverError);
    try {
        advance(s0, g, BoundaryMode{}, 0.0, 0.05);
    } catch (const SolverError& e) {
        CHECK(std::string(e.what()).find("vacuum") != std::string::npos);
    }
}

TEST_CASE("input validation") {
    const Grid1D g = Grid1D::uniform(1.0, 32);
    CHECK_THROWS_AS(step_limit(constant(32, 1.0, 0.0), g, BoundaryMode{}, 1.0, 1.2), std::invalid_argument);
    FluidState bad = constant(32, 1.0, 0.0);
    bad.n[3] = -1.0;
    CHECK_THROWS_AS(step_limit(bad, g, BoundaryMode{}, 1.0, 0.4), std::invalid_argument);
    CHECK_THROWS_AS(step_limit(constant(32, 1.0, 0.0), g, BoundaryMode{BoundaryKind::outflow, -1.5}, 1.0, 0.4),
                    std::invalid_argument);
    CHECK_THROWS_AS(step_limit(constant(32, 1.0, 0.0), g, BoundaryMode{BoundaryKind::outflow, 0.1}, 1.0, 0.4),
                    std::invalid_argument);
    CHECK_NOTHROW(step_limit(constant(32, 1.0, -1.3), g, BoundaryMode{BoundaryKind::outflow, -1.3}, 1.0, 0.4));
    CHECK_THROWS_AS(hll_flux({0.0, 0.0}, {1.0, 0.0}, 1.0), SolverError);
}

TEST_CASE("boundary trace") {
    const Grid1D g = Grid1D::uniform(1.0, 50);
    const BoundaryTrace c = boundary_trace(constant(50, 2.5, 0.0), g);
    CHECK(c.gamma == doctest::Approx(2.5).epsilon(1e-15));
    const BoundaryTrace lin = boundary_trace(sampled(g, [](double x) { return std::pair{1.0 + x, 3.0 * x}; }), g);
    CHECK(lin.gamma == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(lin.u_trace == doctest::Approx(0.0).epsilon(1e-13));
    const BoundaryTrace e = boundary_trace(constant(50, std::exp(1.0), 0.0), g);
    CHECK(e.phi_trace == doctest::Approx(-1.0).epsilon(1e-15));
    // smooth data: third-order accurate extrapolation
    auto f = [](double x) { return std::pair{std::exp(x), 0.0}; };
    const double e1 = std::abs(boundary_trace(sampled(g, f), g).gamma - 1.0);
    const Grid1D g2 = Grid1D::uniform(1.0, 100);
    const double e2 = std::abs(boundary_trace(sampled(g2, f), g2).gamma - 1.0);
    CHECK(e1 / e2 > 7.0);
    FluidState neg = sampled(g, [](double x) { return std::pair{std::max(0.05, 1.0 - 40.0 * x), 0.0}; });
    neg.n[0] = 0.1, neg.n[1] = 1.0, neg.n[2] = 1.9;
    CHECK_THROWS_AS(boundary_trace(neg, g), SolverError);
}

TEST_CASE("snapshot and metadata output") {
    const Grid1D g = Grid1D::uniform(1.0, 16);
    std::ostringstream csv;
    write_state_csv(csv, constant(16, 1.0, 0.0), g);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,n,u");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 16);
    LimitRunOptions o;
    o.t_end = 0.01;
    o.intervals = 2;
    const LimitRun run = run_limit(constant(16, 1.0, 0.0), g, BoundaryMode{}, 1.0, o);
    CHECK(run.samples.size() == 3);
    CHECK(run.samples[1].t == doctest::Approx(0.005));
    std::ostringstream meta;
    write_limit_metadata(meta, run);
    CHECK(meta.str().find("bc=wall") != std::string::npos);
    CHECK(meta.str().find("cells=16") != std::string::npos);
}
