#include "sheath/profiles.hpp"

#include "sheath/errors.hpp"
#include "sheath/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace sheath {

namespace {

// W(Phi) = e^{-Phi} + T e^{Phi/T} - 1 - T >= 0, evaluated without cancellation near 0.
double well_depth(double phi, double ion_temp) {
    return numerics::expm1_minus_x(-phi) + ion_temp * numerics::expm1_minus_x(phi / ion_temp);
}

// Largest |Phi| / min(1, T^i) accepted before the exponentials get out of hand.
constexpr double kExpGuard = 40.0;

}  // namespace

double SheathParams::decay_rate() const { return std::sqrt(gamma * (1.0 + 1.0 / ion_temp)); }

void SheathParams::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("profiles: gamma must be positive");
    if (!(ion_temp > 0.0)) throw std::invalid_argument("profiles: ion_temp must be positive");
    if (!(z_max >= 0.0)) throw std::invalid_argument("profiles: z_max must be positive (0 = default)");
    if (!(tol > 0.0)) throw std::invalid_argument("profiles: tol must be positive");
    if (cells < 16) throw std::invalid_argument("profiles: at least 16 tabulation cells required");
    if (!std::isfinite(wall_value)) throw std::invalid_argument("profiles: wall_value must be finite");
}

double s_nonlinearity(double phi, double ion_temp) {
    return std::expm1(-phi) - std::expm1(phi / ion_temp);
}

double s_derivative(double phi, double ion_temp) {
    return -std::exp(-phi) - std::exp(phi / ion_temp) / ion_temp;
}

double hamiltonian(double p, double phi, const SheathParams& params) {
    return 0.5 * p * p - params.gamma * well_depth(phi, params.ion_temp);
}

double stable_manifold_slope(double phi, const SheathParams& params) {
    if (phi == 0.0) return 0.0;
    // radicand can only go negative through round-off
    const double w = std::max(0.0, well_depth(phi, params.ion_temp));
    const double magnitude = std::sqrt(2.0 * params.gamma * w);
    return phi > 0.0 ? -magnitude : magnitude;
}

double density_layer(double phi, double gamma, double ion_temp) {
    return gamma * std::expm1(phi / ion_temp);
}

SheathProfile solve_leading_profile(const SheathParams& params) {
    params.validate();
    if (std::abs(params.wall_value) / std::min(1.0, params.ion_temp) > kExpGuard) {
        throw std::invalid_argument("profiles: wall potential out of supported range");
    }
    const double z_max = params.resolved_z_max();
    const auto n = static_cast<std::size_t>(params.cells);

    SheathProfile prof;
    prof.decay_rate = params.decay_rate();
    prof.gamma = params.gamma;
    prof.ion_temp = params.ion_temp;
    prof.z.resize(n + 1);
    prof.phi.assign(n + 1, 0.0);
    for (std::size_t k = 0; k <= n; ++k) prof.z[k] = z_max * static_cast<double>(k) / static_cast<double>(n);
    prof.z.back() = z_max;

    prof.phi[0] = params.wall_value;
    if (params.wall_value != 0.0) {
        auto rhs = [&params](double, double phi) { return stable_manifold_slope(phi, params); };
        double h = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            prof.phi[k + 1] =
                numerics::integrate_dopri5(rhs, prof.z[k], prof.z[k + 1], prof.phi[k], params.tol, params.tol, h);
            // the branch never crosses the saddle; a sign flip is pure round-off
            if (prof.phi[k + 1] * params.wall_value < 0.0) prof.phi[k + 1] = 0.0;
        }
    }
    prof.dphi.resize(n + 1);
    prof.n_layer.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        prof.dphi[k] = stable_manifold_slope(prof.phi[k], params);
        prof.n_layer[k] = density_layer(prof.phi[k], params.gamma, params.ion_temp);
    }
    return prof;
}

double SheathProfile::phi_at(double zeta) const {
    if (zeta > z.back()) return 0.0;
    return numerics::hermite(z, phi, dphi, zeta);
}

double SheathProfile::dphi_at(double zeta) const {
    if (zeta > z.back()) return 0.0;
    // slope of the manifold at the interpolated value keeps (p, Phi) on H = 0
    SheathParams p;
    p.gamma = gamma;
    p.ion_temp = ion_temp;
    return stable_manifold_slope(phi_at(zeta), p);
}

double SheathProfile::n_layer_at(double zeta) const { return density_layer(phi_at(zeta), gamma, ion_temp); }

double CorrectorSolution::phi_at(double zeta) const {
    if (zeta > z.back()) return 0.0;
    return numerics::hermite(z, phi, dphi, zeta);
}

CorrectorSolution solve_linear_corrector(const CorrectorProblem& problem, const SheathParams& params) {
    if (!(params.gamma > 0.0) || !(params.ion_temp > 0.0)) {
        throw std::invalid_argument("corrector: gamma and ion_temp must be positive");
    }
    if (!problem.forcing) throw std::invalid_argument("corrector: forcing not set");
    if (problem.grid_cells < 16) throw std::invalid_argument("corrector: at least 16 cells required");
    double z_max = problem.z_max;
    if (!(z_max > 0.0)) {
        z_max = problem.base_profile ? problem.base_profile->z_max() : params.resolved_z_max();
    }

    const auto n = static_cast<std::size_t>(problem.grid_cells);
    const double h = z_max / static_cast<double>(n);
    const double inv_h2 = 1.0 / (h * h);

    CorrectorSolution sol;
    sol.z.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) sol.z[k] = z_max * static_cast<double>(k) / static_cast<double>(n);
    sol.z.back() = z_max;

    // unknowns at interior nodes 1..n-1
    const std::size_t m = n - 1;
    std::vector<double> lower(m, inv_h2), upper(m, inv_h2), diag(m), rhs(m), coef(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double zk = sol.z[j + 1];
        const double base = problem.base_profile ? problem.base_profile->phi_at(zk) : 0.0;
        coef[j] = params.gamma * s_derivative(base, params.ion_temp);
        if (!(coef[j] < 0.0)) throw SolverError("corrector: non-coercive discrete operator");
        diag[j] = -2.0 * inv_h2 + coef[j];
        rhs[j] = problem.forcing(zk);
    }
    rhs[0] -= inv_h2 * problem.wall_value;
    auto inner = numerics::solve_tridiagonal(lower, diag, upper, rhs);

    sol.phi.assign(n + 1, 0.0);
    sol.phi[0] = problem.wall_value;
    std::copy(inner.begin(), inner.end(), sol.phi.begin() + 1);

    double res = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t k = j + 1;
        const double lap = (sol.phi[k + 1] - 2.0 * sol.phi[k] + sol.phi[k - 1]) * inv_h2;
        res = std::max(res, std::abs(lap + coef[j] * sol.phi[k] - problem.forcing(sol.z[k])));
    }
    sol.residual = res;
    sol.dphi = numerics::derivative(sol.z, sol.phi);
    return sol;
}

LayerVelocity layer_velocity_corrector(const SheathProfile& profile, std::span<const double> source) {
    const std::size_t n = profile.z.size();
    if (source.size() != n) throw std::invalid_argument("layer velocity: source not sampled on profile grid");
    // trapezoid with derivative end corrections (fourth order on smooth data)
    const auto ds = numerics::derivative(profile.z, source);
    std::vector<double> cum(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const double h = profile.z[k] - profile.z[k - 1];
        cum[k] = cum[k - 1] + 0.5 * h * (source[k] + source[k - 1]) + h * h / 12.0 * (ds[k - 1] - ds[k]);
    }
    LayerVelocity out;
    out.z = profile.z;
    out.total.resize(n);
    out.layer.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double density = profile.n_layer[k] + profile.gamma;
        if (!(density > 0.0)) throw SolverError("layer velocity: nonpositive layer density");
        out.total[k] = -cum[k] / density;
    }
    out.boundary_trace = -cum.back() / profile.gamma;
    for (std::size_t k = 0; k < n; ++k) out.layer[k] = out.total[k] - out.boundary_trace;
    return out;
}

LayerVelocity layer_velocity_corrector(const SheathProfile& profile, const std::function<double(double)>& source) {
    std::vector<double> s(profile.z.size());
    std::transform(profile.z.begin(), profile.z.end(), s.begin(), source);
    return layer_velocity_corrector(profile, s);
}

void write_profile_csv(std::ostream& out, const SheathProfile& profile) {
    out << "z,phi,dphi,n_layer\n";
    out << std::setprecision(17);
    for (std::size_t k = 0; k < profile.z.size(); ++k) {
        out << profile.z[k] << ',' << profile.phi[k] << ',' << profile.dphi[k] << ',' << profile.n_layer[k] << '\n';
    }
}

}  // namespace sheath
