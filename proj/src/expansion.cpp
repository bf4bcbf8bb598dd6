#include "sheath/expansion.hpp"

#include "sheath/errors.hpp"
#include "sheath/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sheath {

namespace {

/// Parabola through the three nodes around the one nearest to x.
double parabolic(std::span<const double> xs, std::span<const double> ys, double x) {
    const std::size_t n = xs.size();
    std::size_t k = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
    if (k == n || (k > 0 && x - xs[k - 1] < xs[k] - x)) --k;
    k = std::clamp<std::size_t>(k, 1, n - 2);
    return numerics::parabola(xs[k - 1], ys[k - 1], xs[k], ys[k], xs[k + 1], ys[k + 1], x);
}

/// Slope at 0 of the parabola through (0, y0), (a, ya), (b, yb).
double wall_slope(double y0, double a, double ya, double b, double yb) {
    const double da = (ya - y0) / a, db = (yb - y0) / b;
    return (da * b - db * a) / (b - a);
}

std::vector<double> with_wall(double wall_value, std::span<const double> v) {
    std::vector<double> out;
    out.reserve(v.size() + 1);
    out.push_back(wall_value);
    out.insert(out.end(), v.begin(), v.end());
    return out;
}

std::vector<double> wall_nodes(const Grid1D& grid) {
    return with_wall(0.0, grid.centers());
}

void validate_run(const LimitRun& run) {
    if (run.bc.kind != BoundaryKind::wall) throw std::invalid_argument("expansion: only the wall boundary is supported");
    if (run.samples.size() < 3) throw std::invalid_argument("expansion: limit run needs at least 3 time samples");
    for (std::size_t k = 0; k < run.samples.size(); ++k) {
        const FluidState& s = run.samples[k];
        if (s.size() != static_cast<std::size_t>(run.grid.cells())) {
            throw std::invalid_argument("expansion: sample/grid size mismatch");
        }
        for (double n : s.n) {
            if (!(n > kVacuumFloor)) throw std::invalid_argument("expansion: limit run contains vacuum");
        }
        if (k > 0 && !(s.t > run.samples[k - 1].t)) {
            throw std::invalid_argument("expansion: limit run time samples are not increasing");
        }
    }
}

/// Time derivative of tabulated slices by three-point differences in t.
std::vector<std::vector<double>> time_derivative(const std::vector<double>& t,
                                                 const std::vector<const std::vector<double>*>& f) {
    const std::size_t K = t.size(), M = f.front()->size();
    std::vector<std::vector<double>> out(K, std::vector<double>(M));
    std::vector<double> col(K);
    for (std::size_t j = 0; j < M; ++j) {
        for (std::size_t k = 0; k < K; ++k) col[k] = (*f[k])[j];
        const std::vector<double> d = numerics::derivative(t, col);
        for (std::size_t k = 0; k < K; ++k) out[k][j] = d[k];
    }
    return out;
}

/// Linearized limit system around the stored limit solution with wall velocity g(t),
/// advanced with the same reconstruction and time integrator as the limit solver.
class LinearizedInterior {
public:
    LinearizedInterior(const LimitRun& run, std::vector<double> wall_velocity)
        : run_(run), g_(std::move(wall_velocity)), c_(limit_sound_speed(run.ion_temp)) {}

    void solve(std::vector<std::vector<double>>& n1, std::vector<std::vector<double>>& u1) const {
        const std::size_t N = static_cast<std::size_t>(run_.grid.cells());
        const std::size_t K = run_.samples.size();
        std::vector<double> a(N, 0.0), b(N, 0.0);
        n1.assign(K, std::vector<double>(N, 0.0));
        u1.assign(K, std::vector<double>(N, 0.0));
        double t = run_.samples.front().t;
        std::vector<double> da, db, a1(N), b1(N), n0, u0;
        for (std::size_t k = 1; k < K; ++k) {
            const double target = run_.samples[k].t;
            while (target - t > 1e-14 * std::max(1.0, std::abs(target))) {
                base(t, n0, u0);
                double speed = 0.0;
                for (double v : u0) speed = std::max(speed, std::abs(v) + c_);
                const double dt = std::min(run_.cfl * run_.grid.min_width() / speed, target - t);
                rates(a, b, t, da, db);
                for (std::size_t i = 0; i < N; ++i) {
                    a1[i] = a[i] + dt * da[i];
                    b1[i] = b[i] + dt * db[i];
                }
                rates(a1, b1, t + dt, da, db);
                for (std::size_t i = 0; i < N; ++i) {
                    a[i] = 0.5 * (a[i] + a1[i] + dt * da[i]);
                    b[i] = 0.5 * (b[i] + b1[i] + dt * db[i]);
                }
                t += dt;
            }
            t = target;
            base(t, n0, u0);
            for (std::size_t i = 0; i < N; ++i) {
                n1[k][i] = a[i];
                u1[k][i] = (b[i] - a[i] * u0[i]) / n0[i];
            }
        }
    }

private:
    std::size_t interval(double t, double& theta) const {
        const auto& s = run_.samples;
        std::size_t k = 0;
        while (k + 2 < s.size() && t > s[k + 1].t) ++k;
        theta = std::clamp((t - s[k].t) / (s[k + 1].t - s[k].t), 0.0, 1.0);
        return k;
    }

    void base(double t, std::vector<double>& n0, std::vector<double>& u0) const {
        double th = 0.0;
        const std::size_t k = interval(t, th);
        const FluidState &p = run_.samples[k], &q = run_.samples[k + 1];
        n0.resize(p.size());
        u0.resize(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            n0[i] = (1.0 - th) * p.n[i] + th * q.n[i];
            u0[i] = (1.0 - th) * p.u[i] + th * q.u[i];
        }
    }

    double wall_value(double t) const {
        double th = 0.0;
        const std::size_t k = interval(t, th);
        return (1.0 - th) * g_[k] + th * g_[k + 1];
    }

    static double minmod(double a, double b) {
        if (a * b <= 0.0) return 0.0;
        return std::abs(a) < std::abs(b) ? a : b;
    }

    void rates(const std::vector<double>& a, const std::vector<double>& b, double t, std::vector<double>& da,
               std::vector<double>& db) const {
        const Grid1D& grid = run_.grid;
        const std::size_t N = a.size();
        std::vector<double> n0, u0;
        base(t, n0, u0);
        const double g = wall_value(t);
        std::vector<double> xs(N + 4), w(N + 4), qa(N + 4), qu(N + 4), bn(N + 4), bu(N + 4);
        for (std::size_t i = 0; i < N; ++i) {
            xs[i + 2] = grid.center(static_cast<int>(i));
            w[i + 2] = grid.width(static_cast<int>(i));
            qa[i + 2] = a[i];
            qu[i + 2] = (b[i] - a[i] * u0[i]) / n0[i];
            bn[i + 2] = n0[i];
            bu[i + 2] = u0[i];
        }
        const double L = grid.length();
        for (std::size_t gh = 0; gh < 2; ++gh) {
            const std::size_t in_l = 2 + gh, gl = 1 - gh, in_r = N + 1 - gh, gr = N + 2 + gh;
            xs[gl] = -xs[in_l];
            w[gl] = w[in_l];
            qa[gl] = qa[in_l];
            qu[gl] = 2.0 * g - qu[in_l];
            bn[gl] = bn[in_l];
            bu[gl] = -bu[in_l];
            xs[gr] = 2.0 * L - xs[in_r];
            w[gr] = w[in_r];
            qa[gr] = qa[in_r];
            qu[gr] = -qu[in_r];
            bn[gr] = bn[in_r];
            bu[gr] = -bu[in_r];
        }
        std::vector<double> sa(N + 4, 0.0), su(N + 4, 0.0);
        for (std::size_t i = 1; i + 1 < N + 4; ++i) {
            const double dl = xs[i] - xs[i - 1], dr = xs[i + 1] - xs[i];
            sa[i] = minmod((qa[i] - qa[i - 1]) / dl, (qa[i + 1] - qa[i]) / dr);
            su[i] = minmod((qu[i] - qu[i - 1]) / dl, (qu[i + 1] - qu[i]) / dr);
        }
        const double c2 = c_ * c_;
        auto flux = [&](double av, double uv, std::size_t j, double& fa, double& fb) {
            const double bv = bn[j] * uv + av * bu[j];
            fa = bv;
            fb = (c2 - bu[j] * bu[j]) * av + 2.0 * bu[j] * bv;
            return bv;
        };
        da.assign(N, 0.0);
        db.assign(N, 0.0);
        for (std::size_t j = 1; j <= N + 1; ++j) {
            const double al = qa[j] + 0.5 * w[j] * sa[j], ul = qu[j] + 0.5 * w[j] * su[j];
            const double ar = qa[j + 1] - 0.5 * w[j + 1] * sa[j + 1], ur = qu[j + 1] - 0.5 * w[j + 1] * su[j + 1];
            double fal, fbl, far, fbr;
            const double bl = flux(al, ul, j, fal, fbl);
            const double br = flux(ar, ur, j + 1, far, fbr);
            const double alpha = std::max(std::abs(bu[j]), std::abs(bu[j + 1])) + c_;
            const double fa = 0.5 * (fal + far) - 0.5 * alpha * (ar - al);
            const double fb = 0.5 * (fbl + fbr) - 0.5 * alpha * (br - bl);
            if (j >= 2) {
                da[j - 2] -= fa;
                db[j - 2] -= fb;
            }
            if (j - 1 < N) {
                da[j - 1] += fa;
                db[j - 1] += fb;
            }
        }
        for (std::size_t i = 0; i < N; ++i) {
            const double inv = 1.0 / grid.width(static_cast<int>(i));
            da[i] *= inv;
            db[i] *= inv;
        }
    }

    const LimitRun& run_;
    std::vector<double> g_;
    double c_;
};

}  // namespace

LinearizedSolution solve_linearized_limit(const LimitRun& run, std::span<const double> wall_velocity) {
    validate_run(run);
    if (wall_velocity.size() != run.samples.size()) {
        throw std::invalid_argument("linearized limit: one wall velocity per stored time required");
    }
    LinearizedSolution out;
    LinearizedInterior(run, std::vector<double>(wall_velocity.begin(), wall_velocity.end())).solve(out.n1, out.u1);
    return out;
}

ExpansionBundle ExpansionBundle::with_epsilon(double eps) const {
    if (!(eps > 0.0)) throw std::invalid_argument("expansion: epsilon must be positive");
    ExpansionBundle b = *this;
    b.epsilon = eps;
    return b;
}

ExpansionBundle ExpansionBundle::with_order(int k) const {
    if (k < 0 || k > data->order) throw std::invalid_argument("expansion: requested order not available");
    ExpansionBundle b = *this;
    b.order = k;
    return b;
}

ExpansionBundle build_expansion(const LimitRun& run, const PlasmaParams& params, int order) {
    if (order != 0 && order != 1) throw std::invalid_argument("expansion: order must be 0 or 1");
    if (!(params.epsilon > 0.0)) throw std::invalid_argument("expansion: epsilon must be positive");
    validate_run(run);
    if (std::abs(run.ion_temp - params.ion_temp) > 1e-14 * std::max(1.0, params.ion_temp)) {
        throw std::invalid_argument("expansion: limit run and plasma parameters disagree on ion_temp");
    }
    auto data = std::make_shared<ExpansionData>();
    ExpansionData& d = *data;
    d.order = order;
    d.ion_temp = params.ion_temp;
    d.wall_potential = params.wall_potential;
    d.grid = run.grid;
    const std::size_t K = run.samples.size();
    const double T = params.ion_temp;
    const Grid1D& g = run.grid;
    for (const FluidState& s : run.samples) {
        d.times.push_back(s.t);
        d.interior0.push_back(s);
    }

    // order 0: one leading profile per stored time on a common z grid
    std::vector<BoundaryTrace> traces;
    double gamma_min = INFINITY;
    for (const FluidState& s : run.samples) {
        traces.push_back(boundary_trace(s, g));
        gamma_min = std::min(gamma_min, traces.back().gamma);
    }
    SheathParams sp;
    sp.gamma = gamma_min;
    sp.ion_temp = T;
    const double z_max = 40.0 / sp.decay_rate();
    std::vector<SheathProfile> profiles;
    d.layers.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        SheathParams p;
        p.gamma = traces[k].gamma;
        p.ion_temp = T;
        p.wall_value = params.wall_potential - traces[k].phi_trace;
        p.z_max = z_max;
        profiles.push_back(solve_leading_profile(p));
        const SheathProfile& pr = profiles.back();
        LayerSlice& L = d.layers[k];
        L.t = d.times[k];
        L.gamma = p.gamma;
        const FluidState& s = run.samples[k];
        L.u_slope = wall_slope(0.0, g.center(0), s.u[0], g.center(1), s.u[1]);
        L.phi0 = pr.phi;
        L.dphi0 = pr.dphi;
        L.n0 = pr.n_layer;
        L.dn0.resize(pr.z.size());
        for (std::size_t j = 0; j < pr.z.size(); ++j) {
            L.dn0[j] = (p.gamma + pr.n_layer[j]) / T * pr.dphi[j];
        }
        L.layer_mass = numerics::cumulative_trapezoid(pr.z, pr.n_layer).back();
    }
    d.z = profiles.front().z;

    ExpansionBundle bundle;
    bundle.order = order;
    bundle.epsilon = params.epsilon;
    if (order == 0) {
        bundle.data = data;
        return bundle;
    }

    // order 1: layer velocity from the integrated layer mass balance
    std::vector<const std::vector<double>*> n0_slices;
    for (const auto& L : d.layers) n0_slices.push_back(&L.n0);
    const std::vector<std::vector<double>> dt_n0 = time_derivative(d.times, n0_slices);
    std::vector<double> wall_u1(K);
    const std::size_t M = d.z.size();
    for (std::size_t k = 0; k < K; ++k) {
        LayerSlice& L = d.layers[k];
        std::vector<double> source(M);
        for (std::size_t j = 0; j < M; ++j) {
            source[j] = dt_n0[k][j] + L.u_slope * (L.n0[j] + d.z[j] * L.dn0[j]);
        }
        const LayerVelocity lv = layer_velocity_corrector(profiles[k], source);
        L.u1_trace = lv.boundary_trace;
        L.u1 = lv.layer;
        L.du1.resize(M);
        for (std::size_t j = 0; j < M; ++j) {
            L.du1[j] = -(source[j] + lv.total[j] * L.dn0[j]) / (L.gamma + L.n0[j]);
        }
        wall_u1[k] = lv.boundary_trace;
    }

    // first interior corrector: linearized limit system driven by the wall velocity
    LinearizedSolution lin = solve_linearized_limit(run, wall_u1);
    d.n1 = std::move(lin.n1);
    d.u1 = std::move(lin.u1);

    // potential and density correctors inside the layer
    for (std::size_t k = 0; k < K; ++k) {
        LayerSlice& L = d.layers[k];
        const std::vector<double>& n1 = d.n1[k];
        L.n1_trace = numerics::parabola(g.center(0), n1[0], g.center(1), n1[1], g.center(2), n1[2], 0.0);
        const SheathProfile& pr = profiles[k];
        const double gn = L.n1_trace;
        CorrectorProblem cp;
        cp.base_profile = &pr;
        cp.forcing = [&pr, gn, T](double z) { return -gn * s_nonlinearity(pr.phi_at(z), T); };
        cp.wall_value = gn / L.gamma;
        cp.z_max = z_max;
        cp.grid_cells = static_cast<int>(M) - 1;
        SheathParams sp1;
        sp1.gamma = L.gamma;
        sp1.ion_temp = T;
        sp1.wall_value = pr.phi.front();
        sp1.z_max = z_max;
        const CorrectorSolution cs = solve_linear_corrector(cp, sp1);
        L.phi1 = cs.phi;
        L.dphi1 = cs.dphi;
        L.n1.resize(M);
        L.dn1.resize(M);
        for (std::size_t j = 0; j < M; ++j) {
            const double a = L.gamma + L.n0[j];
            const double q = gn / L.gamma + cs.phi[j] / T;
            L.n1[j] = a * q - gn;
            L.dn1[j] = L.dn0[j] * q + a * cs.dphi[j] / T;
        }
    }
    bundle.data = data;
    return bundle;
}

namespace {

struct Blend {
    std::size_t k = 0;
    double theta = 0.0;
};

Blend locate_time(const ExpansionData& d, double t) {
    const auto& ts = d.times;
    const double tol = 1e-12 * std::max(1.0, std::abs(ts.back()));
    if (t < ts.front() - tol || t > ts.back() + tol) {
        std::ostringstream os;
        os << "expansion: time " << t << " outside [" << ts.front() << ", " << ts.back() << "]";
        throw std::out_of_range(os.str());
    }
    std::size_t k = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
    k = std::clamp<std::size_t>(k, 1, ts.size() - 1) - 1;
    return {k, std::clamp((t - ts[k]) / (ts[k + 1] - ts[k]), 0.0, 1.0)};
}

}  // namespace

FluidState interior_at(const ExpansionBundle& bundle, double t, std::span<const double> xs) {
    const ExpansionData& d = *bundle.data;
    const Blend b = locate_time(d, t);
    const std::vector<double> un = wall_nodes(d.grid);
    FluidState out;
    out.t = t;
    out.n.assign(xs.size(), 0.0);
    out.u.assign(xs.size(), 0.0);
    for (int side = 0; side < 2; ++side) {
        const double w = side == 0 ? 1.0 - b.theta : b.theta;
        if (w == 0.0) continue;
        const FluidState& s = d.interior0[b.k + static_cast<std::size_t>(side)];
        const std::vector<double> uw = with_wall(0.0, s.u);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            out.n[i] += w * parabolic(d.grid.centers(), s.n, xs[i]);
            out.u[i] += w * parabolic(un, uw, xs[i]);
        }
    }
    return out;
}

ApproxFields evaluate_at(const ExpansionBundle& bundle, double t, std::span<const double> xs) {
    const ExpansionData& d = *bundle.data;
    const Blend b = locate_time(d, t);
    const double eps = bundle.epsilon;
    const bool first = bundle.order >= 1;
    const std::size_t P = xs.size();
    const double z_max = d.z.back();
    const std::vector<double> un = wall_nodes(d.grid);

    std::vector<double> n0(P, 0.0), u0(P, 0.0), n1(P, 0.0), u1(P, 0.0);
    ApproxFields f;
    f.n_layer.assign(P, 0.0);
    f.u_layer.assign(P, 0.0);
    f.phi_layer.assign(P, 0.0);
    for (int side = 0; side < 2; ++side) {
        const double w = side == 0 ? 1.0 - b.theta : b.theta;
        if (w == 0.0) continue;
        const std::size_t k = b.k + static_cast<std::size_t>(side);
        const FluidState& s = d.interior0[k];
        const LayerSlice& L = d.layers[k];
        const std::vector<double> uw = with_wall(0.0, s.u);
        std::vector<double> u1w;
        if (first) u1w = with_wall(L.u1_trace, d.u1[k]);
        for (std::size_t i = 0; i < P; ++i) {
            const double x = xs[i];
            n0[i] += w * parabolic(d.grid.centers(), s.n, x);
            u0[i] += w * parabolic(un, uw, x);
            if (first) {
                n1[i] += w * parabolic(d.grid.centers(), d.n1[k], x);
                u1[i] += w * parabolic(un, u1w, x);
            }
            const double z = x / eps;
            if (z >= z_max) continue;
            f.n_layer[i] += w * numerics::hermite(d.z, L.n0, L.dn0, z);
            f.phi_layer[i] += w * numerics::hermite(d.z, L.phi0, L.dphi0, z);
            if (first) {
                f.n_layer[i] += w * eps * numerics::hermite(d.z, L.n1, L.dn1, z);
                f.phi_layer[i] += w * eps * numerics::hermite(d.z, L.phi1, L.dphi1, z);
                f.u_layer[i] += w * eps * numerics::hermite(d.z, L.u1, L.du1, z);
            }
        }
    }
    f.n.resize(P);
    f.u.resize(P);
    f.phi.resize(P);
    for (std::size_t i = 0; i < P; ++i) {
        const double phi0 = -std::log(n0[i]);
        const double phi1 = first ? -n1[i] / n0[i] : 0.0;
        f.n[i] = n0[i] + eps * n1[i] + f.n_layer[i];
        f.u[i] = u0[i] + eps * u1[i] + f.u_layer[i];
        f.phi[i] = phi0 + eps * phi1 + f.phi_layer[i];
    }
    return f;
}

ApproxFields evaluate(const ExpansionBundle& bundle, double t, const Grid1D& grid) {
    return evaluate_at(bundle, t, grid.centers());
}

ResidualReport residual(const ExpansionBundle& bundle, const PlasmaParams& params, const Grid1D& grid, double t) {
    const ExpansionData& d = *bundle.data;
    const double dt = (d.times.back() - d.times.front()) / static_cast<double>(d.times.size() - 1);
    const auto nodes = grid.nodes();
    const ApproxFields now = evaluate_at(bundle, t, nodes);
    const ApproxFields before = evaluate_at(bundle, t - dt, nodes);
    const ApproxFields after = evaluate_at(bundle, t + dt, nodes);
    const std::size_t P = nodes.size();
    std::vector<double> flux(P), logn(P);
    for (std::size_t i = 0; i < P; ++i) {
        flux[i] = now.n[i] * now.u[i];
        logn[i] = std::log(now.n[i]);
    }
    const std::vector<double> dflux = numerics::derivative(nodes, flux);
    const std::vector<double> du = numerics::derivative(nodes, now.u);
    const std::vector<double> dlogn = numerics::derivative(nodes, logn);
    const std::vector<double> dphi = numerics::derivative(nodes, now.phi);
    const double e2 = bundle.epsilon * bundle.epsilon;
    ResidualReport r;
    r.epsilon = bundle.epsilon;
    for (std::size_t i = 1; i + 1 < P; ++i) {
        const double w = grid.width(static_cast<int>(i - 1));
        const double rn = (after.n[i] - before.n[i]) / (2.0 * dt) + dflux[i];
        const double ru = (after.u[i] - before.u[i]) / (2.0 * dt) + now.u[i] * du[i] + params.ion_temp * dlogn[i] - dphi[i];
        const double hl = nodes[i] - nodes[i - 1], hr = nodes[i + 1] - nodes[i];
        const double lap = 2.0 * ((now.phi[i + 1] - now.phi[i]) / hr - (now.phi[i] - now.phi[i - 1]) / hl) / (hl + hr);
        const double rp = e2 * lap + std::exp(-now.phi[i]) - now.n[i];
        r.r_n_norm += rn * rn * w;
        r.r_u_norm += ru * ru * w;
        r.r_phi_norm += rp * rp * w;
    }
    r.r_n_norm = std::sqrt(r.r_n_norm);
    r.r_u_norm = std::sqrt(r.r_u_norm);
    r.r_phi_norm = std::sqrt(r.r_phi_norm);
    return r;
}

void write_bundle_csv(std::ostream& out, const ExpansionBundle& bundle, double t, const Grid1D& grid) {
    const ApproxFields f = evaluate(bundle, t, grid);
    out.precision(17);
    out << "x,n_a,u_a,phi_a,n_layer_part,phi_layer_part\n";
    for (int i = 0; i < grid.cells(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        out << grid.center(i) << ',' << f.n[k] << ',' << f.u[k] << ',' << f.phi[k] << ',' << f.n_layer[k] << ','
            << f.phi_layer[k] << '\n';
    }
}

}  // namespace sheath
