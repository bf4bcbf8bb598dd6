#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sheath/errors.hpp"
#include "sheath/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace sheath;

namespace {

LimitRun limit_run(int cells, int intervals, double t_end, double amplitude, bool velocity_pulse,
                   double center = 0.5, double width = 0.1) {
    const Grid1D g = Grid1D::uniform(1.0, cells);
    FluidState s;
    for (double x : g.centers()) {
        const double b = amplitude * std::exp(-std::pow((x - center) / width, 2));
        s.n.push_back(velocity_pulse ? 1.0 : 1.0 + b);
        s.u.push_back(velocity_pulse ? -b : 0.0);
    }
    LimitRunOptions o;
    o.t_end = t_end;
    o.intervals = intervals;
    return run_limit(s, g, BoundaryMode{}, 1.0, o);
}

PlasmaParams plasma(double eps, double phi_b) {
    PlasmaParams p;
    p.epsilon = eps;
    p.wall_potential = phi_b;
    return p;
}

}  // namespace

TEST_CASE("flat limit state with neutral wall gives no layer") {
    const LimitRun run = limit_run(64, 4, 0.1, 0.0, false);
    for (int order : {0, 1}) {
        const ExpansionBundle b = build_expansion(run, plasma(0.05, 0.0), order);
        for (const auto& L : b.data->layers) {
            for (double v : L.phi0) CHECK(v == 0.0);
            for (double v : L.n0) CHECK(v == 0.0);
            if (order == 1) {
                for (double v : L.u1) CHECK(v == 0.0);
                for (double v : L.phi1) CHECK(std::abs(v) <= 1e-15);
            }
        }
        const Grid1D g = Grid1D::uniform(1.0, 50);
        const ApproxFields f = evaluate(b, 0.05, g);
        for (std::size_t i = 0; i < f.n.size(); ++i) {
            CHECK(f.n[i] == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(std::abs(f.u[i]) <= 1e-14);
            CHECK(std::abs(f.phi[i]) <= 1e-14);
        }
    }
}

TEST_CASE("flat limit state with negative wall potential") {
    const LimitRun run = limit_run(64, 4, 0.1, 0.0, false);
    const ExpansionBundle b = build_expansion(run, plasma(0.05, -0.5), 0);
    SheathParams sp;
    sp.wall_value = -0.5;
    sp.z_max = b.data->z.back();
    const SheathProfile ref = solve_leading_profile(sp);
    for (const auto& L : b.data->layers) {
        for (std::size_t j = 0; j < L.phi0.size(); ++j) {
            CHECK(L.phi0[j] == doctest::Approx(ref.phi[j]).epsilon(1e-13));
            CHECK(L.n0[j] <= 0.0);
        }
    }
    // decay at the end of the layer grid
    CHECK(std::abs(b.data->layers.front().phi0.back()) <= 1e-12);
    CHECK(std::abs(b.data->layers.front().n0.back()) <= 1e-12);
}

TEST_CASE("matching at the wall and layer support") {
    const LimitRun run = limit_run(400, 40, 0.2, 0.1, true, 0.3, 0.08);
    const ExpansionBundle b1 = build_expansion(run, plasma(0.02, 0.7), 1);
    const std::vector<double> at_wall = {0.0};
    for (int order : {0, 1}) {
        const ExpansionBundle b = b1.with_order(order);
        for (double t : b.data->times) {
            const ApproxFields f = evaluate_at(b, t, at_wall);
            CHECK(f.phi[0] == doctest::Approx(0.7).epsilon(1e-12));
            CHECK(std::abs(f.u[0]) <= 1e-14);
        }
    }
    // far from the wall only the interior part remains
    const double x_far = 1.05 * 0.02 * b1.data->z.back();
    REQUIRE(x_far < 1.0);
    const std::vector<double> far = {x_far, 0.9};
    const ApproxFields f = evaluate_at(b1.with_order(0), 0.15, far);
    const FluidState in = interior_at(b1, 0.15, far);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(f.n_layer[i] == 0.0);
        CHECK(f.n[i] == in.n[i]);
        CHECK(f.phi[i] == doctest::Approx(-std::log(in.n[i])).epsilon(1e-14));
    }
}

TEST_CASE("layer term is self-similar in x / epsilon") {
    const LimitRun run = limit_run(400, 40, 0.2, 0.1, true, 0.3, 0.08);
    const ExpansionBundle b = build_expansion(run, plasma(0.02, 0.7), 0);
    const ExpansionBundle h = b.with_epsilon(0.01);
    std::vector<double> xs, half;
    for (int i = 0; i < 50; ++i) {
        xs.push_back(0.003 * i);
        half.push_back(0.0015 * i);
    }
    const ApproxFields a = evaluate_at(b, 0.17, xs);
    const ApproxFields c = evaluate_at(h, 0.17, half);
    const FluidState ia = interior_at(b, 0.17, xs), ic = interior_at(b, 0.17, half);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(a.n_layer[i] == doctest::Approx(c.n_layer[i]).epsilon(1e-14));
        CHECK(a.n[i] - c.n[i] == doctest::Approx(ia.n[i] - ic.n[i]).epsilon(1e-12));
    }
}

TEST_CASE("evaluation is linear in the layer tabulation") {
    const LimitRun run = limit_run(200, 10, 0.1, 0.1, false);
    const ExpansionBundle b = build_expansion(run, plasma(0.05, 1.0), 0);
    auto scaled = std::make_shared<ExpansionData>(*b.data);
    for (auto& L : scaled->layers) {
        for (double& v : L.n0) v *= 3.0;
        for (double& v : L.dn0) v *= 3.0;
    }
    ExpansionBundle s = b;
    s.data = scaled;
    const Grid1D g = Grid1D::geometric(1.0, 0.002, 1.1, 0.01);
    const ApproxFields f = evaluate(b, 0.033, g), k = evaluate(s, 0.033, g);
    for (std::size_t i = 0; i < f.n.size(); ++i) CHECK(k.n_layer[i] == doctest::Approx(3.0 * f.n_layer[i]).epsilon(1e-14));
}

TEST_CASE("linearized interior matches a simple wave") {
    // around n = 1, u = 0 a wall velocity g(t) launches n1 = g(t - x/c)/c, u1 = g(t - x/c)
    const double c = std::sqrt(2.0);
    auto g = [](double t) { return t < 0.0 ? 0.0 : 0.01 * std::pow(std::sin(std::acos(-1.0) * std::min(t, 0.2) / 0.2), 4); };
    double errs[2];
    int idx = 0;
    for (int cells : {400, 800}) {
        const LimitRun run = limit_run(cells, 200, 0.3, 0.0, false);
        std::vector<double> wall;
        for (const auto& s : run.samples) wall.push_back(g(s.t));
        const LinearizedSolution lin = solve_linearized_limit(run, wall);
        double e = 0.0, worst = 0.0;
        const std::size_t k = run.samples.size() - 1;
        for (int i = 0; i < cells; ++i) {
            const double x = run.grid.center(i);
            const double exact = g(run.samples[k].t - x / c);
            const double du = std::abs(lin.u1[k][static_cast<std::size_t>(i)] - exact);
            const double dn = std::abs(lin.n1[k][static_cast<std::size_t>(i)] - exact / c);
            e += (du + dn) * run.grid.width(i);
            worst = std::max({worst, du, dn});
        }
        MESSAGE(cells << " cells: L1 error " << e << ", max error " << worst);
        CHECK(worst <= 5e-4);
        errs[idx++] = e;
    }
    CHECK(errs[0] / errs[1] >= 3.0);
}

TEST_CASE("order-1 layer pieces satisfy their relations") {
    const LimitRun run = limit_run(400, 40, 0.2, 0.1, true, 0.3, 0.08);
    const ExpansionBundle b = build_expansion(run, plasma(0.02, 0.7), 1);
    const double T = 1.0;
    for (const auto& L : b.data->layers) {
        // wall matching of the corrector potential and decay of every layer field
        CHECK(L.phi1.front() == doctest::Approx(L.n1_trace / L.gamma).epsilon(1e-12));
        CHECK(std::abs(L.u1.back()) <= 1e-10);
        CHECK(std::abs(L.n1.back()) <= 1e-10);
        // density corrector from the momentum balance
        const std::size_t j = L.n1.size() / 7;
        const double a = L.gamma + L.n0[j];
        CHECK(L.n1[j] == doctest::Approx(a * (L.n1_trace / L.gamma + L.phi1[j] / T) - L.n1_trace).epsilon(1e-13));
        // no-flux wall: the layer velocity cancels the interior trace at z = 0
        CHECK(L.u1.front() == doctest::Approx(-L.u1_trace).epsilon(1e-12));
    }
    // the trace equals -(1/gamma) dM/dt
    const auto& ls = b.data->layers;
    const std::size_t k = ls.size() / 2;
    const double dm = (ls[k + 1].layer_mass - ls[k - 1].layer_mass) / (ls[k + 1].t - ls[k - 1].t);
    CHECK(ls[k].u1_trace == doctest::Approx(-dm / ls[k].gamma).epsilon(1e-2));
}

TEST_CASE("residuals") {
    // constant neutral state: exact solution
    const LimitRun flat = limit_run(64, 4, 0.1, 0.0, false);
    const Grid1D g = Grid1D::geometric(1.0, 1e-3, 1.1, 0.01);
    const ResidualReport r = residual(build_expansion(flat, plasma(0.05, 0.0), 1), plasma(0.05, 0.0), g, 0.05);
    CHECK(r.r_n_norm <= 1e-12);
    CHECK(r.r_u_norm <= 1e-12);
    CHECK(r.r_phi_norm <= 1e-12);

    // wall dynamics: the layer mass defect of order 0 is removed at order 1
    const LimitRun run = limit_run(1000, 100, 0.2, 0.1, true, 0.3, 0.08);
    const ExpansionBundle b = build_expansion(run, plasma(0.02, 0.5), 1);
    std::vector<double> r0, r1;
    for (double eps : {0.04, 0.02, 0.01}) {
        const Grid1D fg = Grid1D::geometric(1.0, eps / 64.0, 1.05, 2e-3);
        const PlasmaParams p = plasma(eps, 0.5);
        r0.push_back(residual(b.with_epsilon(eps).with_order(0), p, fg, 0.18).r_n_norm);
        r1.push_back(residual(b.with_epsilon(eps), p, fg, 0.18).r_n_norm);
    }
    CHECK(r1[1] < r0[1]);
    const double ratio = r0[0] / r0[1];
    CHECK(ratio >= 1.2);
    CHECK(ratio <= 3.2);
    const double s0 = std::log(r0[0] / r0[2]) / std::log(4.0), s1 = std::log(r1[0] / r1[2]) / std::log(4.0);
    MESSAGE("order-0 slope " << s0 << ", order-1 slope " << s1);
    CHECK(s1 - s0 >= 0.6);
}

TEST_CASE("input validation") {
    const LimitRun run = limit_run(64, 4, 0.1, 0.0, false);
    CHECK_THROWS_AS(build_expansion(run, plasma(0.05, 0.0), 2), std::invalid_argument);
    LimitRun out = run;
    out.bc = {BoundaryKind::outflow, -0.3};
    CHECK_THROWS_AS(build_expansion(out, plasma(0.05, 0.0), 0), std::invalid_argument);
    LimitRun shuffled = run;
    std::swap(shuffled.samples[1], shuffled.samples[2]);
    CHECK_THROWS_AS(build_expansion(shuffled, plasma(0.05, 0.0), 0), std::invalid_argument);
    LimitRun vacuum = run;
    vacuum.samples[2].n[3] = 0.0;
    CHECK_THROWS_AS(build_expansion(vacuum, plasma(0.05, 0.0), 0), std::invalid_argument);
    const ExpansionBundle b = build_expansion(run, plasma(0.05, 0.0), 0);
    CHECK_THROWS_AS(evaluate(b, 0.2, Grid1D::uniform(1.0, 16)), std::out_of_range);
    CHECK_THROWS_AS(b.with_order(1), std::invalid_argument);
}

TEST_CASE("bundle CSV") {
    const LimitRun run = limit_run(64, 4, 0.1, 0.1, false);
    const ExpansionBundle b = build_expansion(run, plasma(0.05, 0.3), 1);
    std::ostringstream os;
    write_bundle_csv(os, b, 0.05, Grid1D::uniform(1.0, 20));
    const std::string text = os.str();
    CHECK(text.rfind("x,n_a,u_a,phi_a,n_layer_part,phi_layer_part\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 21);
}
