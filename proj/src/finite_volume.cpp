#include "sheath/finite_volume.hpp"

#include "sheath/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sheath {

void BoundaryMode::validate(double sound_speed) const {
    if (kind == BoundaryKind::outflow && !(u_b < 0.0 && u_b > -sound_speed)) {
        std::ostringstream os;
        os << "boundary: outflow velocity must satisfy " << -sound_speed << " < u_b < 0";
        throw std::invalid_argument(os.str());
    }
}

void FluidState::validate() const {
    if (n.size() != u.size()) throw std::invalid_argument("state: n and u sizes differ");
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!std::isfinite(n[i]) || !std::isfinite(u[i])) throw std::invalid_argument("state: non-finite value");
        if (!(n[i] > 0.0)) throw std::invalid_argument("state: density must be positive");
    }
}

double FluidState::mass(const Grid1D& grid) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) s += n[i] * grid.width(static_cast<int>(i));
    return s;
}

std::string describe_state(Primitive s) {
    std::ostringstream os;
    os.precision(17);
    os << "(n=" << s.n << ", u=" << s.u << ")";
    return os.str();
}

Flux physical_flux(Primitive s, double c) { return {s.n * s.u, s.n * s.u * s.u + c * c * s.n}; }

std::pair<double, double> hll_wave_speeds(Primitive l, Primitive r, double c) {
    return {std::min(l.u - c, r.u - c), std::max(l.u + c, r.u + c)};
}

Flux hll_flux(Primitive l, Primitive r, double c) {
    if (!(l.n > 0.0) || !(r.n > 0.0)) {
        throw SolverError("flux: nonpositive density " + describe_state(l) + " | " + describe_state(r));
    }
    const auto [sl, sr] = hll_wave_speeds(l, r, c);
    const Flux fl = physical_flux(l, c);
    const Flux fr = physical_flux(r, c);
    if (sl >= 0.0) return fl;
    if (sr <= 0.0) return fr;
    const double inv = 1.0 / (sr - sl);
    return {(sr * fl.mass - sl * fr.mass + sl * sr * (r.n - l.n)) * inv,
            (sr * fl.momentum - sl * fr.momentum + sl * sr * (r.n * r.u - l.n * l.u)) * inv};
}

namespace {

// velocity change across a wave connecting density nk to ns, and its derivative in ns
std::pair<double, double> wave_function(double ns, double nk, double c) {
    if (ns > nk) {
        const double root = std::sqrt(ns * nk);
        return {c * (ns - nk) / root, c * (ns + nk) / (2.0 * ns * root)};
    }
    return {c * std::log(ns / nk), c / ns};
}

}  // namespace

Primitive exact_riemann_state(Primitive l, Primitive r, double c) {
    if (!(l.n > 0.0) || !(r.n > 0.0)) {
        throw SolverError("flux: nonpositive density " + describe_state(l) + " | " + describe_state(r));
    }
    // Newton on log(n*) for f(n*) = f_L + f_R + (u_R - u_L) = 0 (monotone increasing)
    double logn = 0.5 * (std::log(l.n) + std::log(r.n));
    for (int it = 0; it < 100; ++it) {
        const double ns = std::exp(logn);
        const auto [fl, dfl] = wave_function(ns, l.n, c);
        const auto [fr, dfr] = wave_function(ns, r.n, c);
        const double f = fl + fr + (r.u - l.u);
        const double step = f / ((dfl + dfr) * ns);
        logn -= std::clamp(step, -2.0, 2.0);
        if (std::abs(step) < 1e-15) break;
    }
    const double ns = std::exp(logn);
    const double us = 0.5 * (l.u + r.u) + 0.5 * (wave_function(ns, r.n, c).first - wave_function(ns, l.n, c).first);
    if (us >= 0.0) {
        if (ns > l.n) {
            const double shock = l.u - c * std::sqrt(ns / l.n);
            return shock >= 0.0 ? l : Primitive{ns, us};
        }
        if (l.u - c >= 0.0) return l;
        if (us - c <= 0.0) return {ns, us};
        return {l.n * std::exp((l.u - c) / c), c};
    }
    if (ns > r.n) {
        const double shock = r.u + c * std::sqrt(ns / r.n);
        return shock <= 0.0 ? r : Primitive{ns, us};
    }
    if (r.u + c <= 0.0) return r;
    if (us + c >= 0.0) return {ns, us};
    return {r.n * std::exp((-c - r.u) / c), -c};
}

Flux exact_flux(Primitive l, Primitive r, double c) { return physical_flux(exact_riemann_state(l, r, c), c); }

Flux numerical_flux(Primitive l, Primitive r, double c, RiemannSolver solver) {
    return solver == RiemannSolver::hll ? hll_flux(l, r, c) : exact_flux(l, r, c);
}

namespace {

double minmod(double a, double b) {
    if (a * b <= 0.0) return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

}  // namespace

void hyperbolic_rates(const Grid1D& grid, std::span<const double> n, std::span<const double> m, double c,
                      const BoundaryMode& left, RiemannSolver solver, FvRates& out) {
    const int nc = grid.cells();
    const auto N = static_cast<std::size_t>(nc);
    // extended arrays with two ghosts on each side
    std::vector<double> xs(N + 4), wn(N + 4), qn(N + 4), qu(N + 4);
    for (std::size_t i = 0; i < N; ++i) {
        xs[i + 2] = grid.center(static_cast<int>(i));
        wn[i + 2] = grid.width(static_cast<int>(i));
        qn[i + 2] = n[i];
        qu[i + 2] = m[i] / n[i];
    }
    const double L = grid.length();
    for (std::size_t g = 0; g < 2; ++g) {
        const std::size_t in_l = 2 + g, gh_l = 1 - g;
        xs[gh_l] = -xs[in_l];
        wn[gh_l] = wn[in_l];
        if (left.kind == BoundaryKind::wall) {
            qn[gh_l] = qn[in_l];
            qu[gh_l] = -qu[in_l];
        } else {
            qn[gh_l] = qn[2];
            qu[gh_l] = left.u_b;
        }
        const std::size_t in_r = N + 1 - g, gh_r = N + 2 + g;
        xs[gh_r] = 2.0 * L - xs[in_r];
        wn[gh_r] = wn[in_r];
        qn[gh_r] = qn[in_r];
        qu[gh_r] = -qu[in_r];
    }
    // limited slopes for cells 1..N+2 of the extended array
    std::vector<double> sn(N + 4, 0.0), su(N + 4, 0.0);
    for (std::size_t i = 1; i + 1 < N + 4; ++i) {
        const double dl = xs[i] - xs[i - 1], dr = xs[i + 1] - xs[i];
        sn[i] = minmod((qn[i] - qn[i - 1]) / dl, (qn[i + 1] - qn[i]) / dr);
        su[i] = minmod((qu[i] - qu[i - 1]) / dl, (qu[i + 1] - qu[i]) / dr);
    }
    out.dn.assign(N, 0.0);
    out.dm.assign(N, 0.0);
    // faces between extended cells j and j+1 for j = 1..N+1 (interior faces plus the two boundary faces)
    for (std::size_t j = 1; j <= N + 1; ++j) {
        const Primitive sl{qn[j] + 0.5 * wn[j] * sn[j], qu[j] + 0.5 * wn[j] * su[j]};
        const Primitive sr{qn[j + 1] - 0.5 * wn[j + 1] * sn[j + 1], qu[j + 1] - 0.5 * wn[j + 1] * su[j + 1]};
        const Flux f = numerical_flux(sl, sr, c, solver);
        if (j == 1) out.wall_mass_flux = f.mass;
        // face j sits between interior cells j-2 and j-1
        if (j >= 2) {
            out.dn[j - 2] -= f.mass;
            out.dm[j - 2] -= f.momentum;
        }
        if (j - 1 < N) {
            out.dn[j - 1] += f.mass;
            out.dm[j - 1] += f.momentum;
        }
    }
    for (std::size_t i = 0; i < N; ++i) {
        const double inv = 1.0 / grid.width(static_cast<int>(i));
        out.dn[i] *= inv;
        out.dm[i] *= inv;
    }
}

}  // namespace sheath
