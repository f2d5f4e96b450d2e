#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>

namespace fvlab::spacetime {

// Parametrized 1-form field on the spacetime [0,T] x S^1,
//
//   omega(u) = omega0(u; t, theta) dtheta + omega1(u; t, theta) dt,
//
// with the orientation convention dt ^ dtheta positive. The conservation law
// d(omega(u)) = 0 reads d_t(omega0(u)) - d_theta(omega1(u)) = 0 in these
// coordinates, so a classical law d_t u + d_x f(u) = 0 on the unit circle
// (x = theta / 2pi) embeds as omega0 = u / 2pi, omega1 = -f(u).
//
// Geometry compatibility means each frozen-u form is closed:
// d_t omega0(u) = d_theta omega1(u). Constants are then exact solutions.
struct FluxField1Form {
    std::string name;
    // Coefficients and their u-derivatives, as (u, t, theta) -> value.
    std::function<double(double, double, double)> omega0;
    std::function<double(double, double, double)> omega1;
    std::function<double(double, double, double)> domega0;
    std::function<double(double, double, double)> domega1;
};

// Smooth bijection of [0,T] x S^1 (slice topology preserving). jacobian
// returns {dT/dt, dT/dtheta, dTheta/dt, dTheta/dtheta}.
struct SpacetimeDiffeo {
    std::string name;
    std::function<std::pair<double, double>(double, double)> forward;
    std::function<std::pair<double, double>(double, double)> inverse;
    std::function<std::array<double, 4>(double, double)> jacobian;
};

// Pullback of the flux field under the diffeomorphism:
//   (Phi^* omega)(u) = omega0(u; Phi) dTheta + omega1(u; Phi) dT
// expanded in (t, theta). Closedness is preserved. Throws InvariantError if
// the Jacobian is degenerate or orientation-reversing at a sampled point of
// [0, t_max] x S^1.
FluxField1Form pullback_flux(const FluxField1Form& omega,
                             const SpacetimeDiffeo& diffeo, double t_max = 1.0);

// Max finite-difference residual of d_t omega0 - d_theta omega1 over a
// seeded sample of (u, t, theta). The floor of the check is ~1e-8.
double geometry_compatibility_check(const FluxField1Form& omega, int samples,
                                    std::uint64_t seed, double u_range = 2.0,
                                    double t_range = 1.0);

// Presets used by the harness and the tests.
FluxField1Form flat_burgers_flux();          // omega0 = u/2pi, omega1 = -u^2/2
FluxField1Form variable_coefficient_flux();  // theta-dependent measure + transport
SpacetimeDiffeo shear_diffeo(double rate);   // (t, theta) -> (t, theta + rate t)
SpacetimeDiffeo theta_reparametrization(double amplitude);  // theta -> theta + a sin(theta)
FluxField1Form preset_flux(const std::string& name);

}  // namespace fvlab::spacetime
