#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sheath {

/// Parameters of the leading-order sheath problem
///   Phi'' + gamma * S(Phi) = 0,  Phi(0) = wall_value,  Phi(inf) = 0.
struct SheathParams {
    double gamma = 1.0;      ///< boundary trace of the limit density
    double ion_temp = 1.0;   ///< T^i
    double wall_value = 0.0; ///< Phi at z = 0
    double z_max = 0.0;      ///< truncation length; 0 selects 40 / decay_rate
    double tol = 1e-10;      ///< local error tolerance of the manifold integration
    int cells = 4096;        ///< uniform tabulation cells on [0, z_max]

    /// Linearization eigenvalue sqrt(gamma (1 + 1/T^i)) at the saddle (0, 0).
    double decay_rate() const;
    double resolved_z_max() const { return z_max > 0.0 ? z_max : 40.0 / decay_rate(); }
    void validate() const;
};

/// Tabulated boundary-layer profile on a uniform z grid.
struct SheathProfile {
    std::vector<double> z;
    std::vector<double> phi;     ///< Phi^0
    std::vector<double> dphi;    ///< dPhi^0/dz
    std::vector<double> n_layer; ///< N^0 = gamma (e^{Phi/T^i} - 1)
    double decay_rate = 0.0;
    double gamma = 1.0;
    double ion_temp = 1.0;

    double z_max() const { return z.back(); }
    /// Cubic Hermite evaluation of Phi^0 (zero beyond z_max).
    double phi_at(double zeta) const;
    double dphi_at(double zeta) const;
    /// N^0 recomputed from the interpolated Phi^0, so the layer relation holds pointwise.
    double n_layer_at(double zeta) const;
};

/// Linear corrector problem Phi'' + gamma S'(base) Phi = forcing, Phi(0) = wall_value, Phi(z_max) = 0.
struct CorrectorProblem {
    const SheathProfile* base_profile = nullptr;
    std::function<double(double)> forcing;
    double wall_value = 0.0;
    double z_max = 0.0;
    int grid_cells = 4096;
};

/// Tabulated solution of a corrector problem.
struct CorrectorSolution {
    std::vector<double> z;
    std::vector<double> phi;
    std::vector<double> dphi;
    double residual = 0.0; ///< max discrete residual of the solved system

    double phi_at(double zeta) const;
};

/// Layer velocity from the integrated mass balance inside the layer.
struct LayerVelocity {
    std::vector<double> z;
    std::vector<double> total;  ///< U + Gamma u
    std::vector<double> layer;  ///< U, decays at z_max
    double boundary_trace = 0.0; ///< Gamma u, the interior wall value
};

/// S(Phi) = e^{-Phi} - e^{Phi/T^i}.
double s_nonlinearity(double phi, double ion_temp);
/// S'(Phi) = -e^{-Phi} - e^{Phi/T^i} / T^i.
double s_derivative(double phi, double ion_temp);

/// H(p, Phi) = p^2/2 + T(Phi) with T(0) = 0.
double hamiltonian(double p, double phi, const SheathParams& params);

/// Slope p(Phi) of the stable-manifold branch of {H = 0}.
double stable_manifold_slope(double phi, const SheathParams& params);

/// Leading layer density N^0 as a function of Phi^0.
double density_layer(double phi, double gamma, double ion_temp);

/// Integrates the stable manifold from Phi(0) = wall_value and tabulates the profile.
SheathProfile solve_leading_profile(const SheathParams& params);

/// Second-order finite-difference solve of the linear corrector problem.
CorrectorSolution solve_linear_corrector(const CorrectorProblem& problem, const SheathParams& params);

/// (U + Gamma u)(z) = -1/(N^0 + gamma) * int_0^z source; `source` is sampled on profile.z.
LayerVelocity layer_velocity_corrector(const SheathProfile& profile, std::span<const double> source);
LayerVelocity layer_velocity_corrector(const SheathProfile& profile, const std::function<double(double)>& source);

/// CSV with header `z,phi,dphi,n_layer`, 17 significant digits.
void write_profile_csv(std::ostream& out, const SheathProfile& profile);

}  // namespace sheath
