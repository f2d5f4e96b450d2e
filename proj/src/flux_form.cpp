#include "fvlab/flux_form.hpp"

#include <cmath>
#include <random>

#include "fvlab/errors.hpp"
#include "fvlab/numerics.hpp"

namespace fvlab::spacetime {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

FluxField1Form pullback_flux(const FluxField1Form& omega,
                             const SpacetimeDiffeo& diffeo, double t_max) {
    // Reject orientation-reversing or degenerate maps up front.
    for (int i = 0; i <= 8; ++i) {
        for (int j = 0; j < 16; ++j) {
            const double t = t_max * i / 8.0;
            const double th = kTwoPi * j / 16.0;
            const auto J = diffeo.jacobian(t, th);
            const double det = J[0] * J[3] - J[1] * J[2];
            if (!(det > 1e-12))
                throw InvariantError("pullback_flux: " + diffeo.name +
                                     " is degenerate or orientation-reversing");
        }
    }

    FluxField1Form out;
    out.name = omega.name + "+" + diffeo.name;
    auto fwd = diffeo.forward;
    auto jac = diffeo.jacobian;
    auto make_coeff = [fwd, jac](std::function<double(double, double, double)> w0,
                                 std::function<double(double, double, double)> w1,
                                 bool theta_component) {
        return [=](double u, double t, double th) {
            const auto [T, Th] = fwd(t, th);
            const auto J = jac(t, th);  // {T_t, T_th, Th_t, Th_th}
            // coefficient of dtheta picks up d/dtheta of (Theta, T);
            // coefficient of dt picks up d/dt.
            const double dTheta = theta_component ? J[3] : J[2];
            const double dT = theta_component ? J[1] : J[0];
            return w0(u, T, Th) * dTheta + w1(u, T, Th) * dT;
        };
    };
    out.omega0 = make_coeff(omega.omega0, omega.omega1, true);
    out.omega1 = make_coeff(omega.omega0, omega.omega1, false);
    out.domega0 = make_coeff(omega.domega0, omega.domega1, true);
    out.domega1 = make_coeff(omega.domega0, omega.domega1, false);
    return out;
}

double geometry_compatibility_check(const FluxField1Form& omega, int samples,
                                    std::uint64_t seed, double u_range,
                                    double t_range) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double u = u_range * (2.0 * unif(rng) - 1.0);
        const double t = t_range * unif(rng);
        const double th = kTwoPi * unif(rng);
        const double dt_w0 = fd_directional(
            [&](double s) { return omega.omega0(u, t + s, th); }, 1e-4);
        const double dth_w1 = fd_directional(
            [&](double s) { return omega.omega1(u, t, th + s); }, 1e-4);
        worst = std::max(worst, std::abs(dt_w0 - dth_w1));
    }
    return worst;
}

FluxField1Form flat_burgers_flux() {
    FluxField1Form w;
    w.name = "flat-burgers";
    w.omega0 = [](double u, double, double) { return u / kTwoPi; };
    w.omega1 = [](double u, double, double) { return -0.5 * u * u; };
    w.domega0 = [](double, double, double) { return 1.0 / kTwoPi; };
    w.domega1 = [](double u, double, double) { return -u; };
    return w;
}

FluxField1Form variable_coefficient_flux() {
    FluxField1Form w;
    w.name = "variable-coefficient";
    w.omega0 = [](double u, double, double th) {
        return (1.0 + 0.5 * std::sin(th)) * (u + 0.1 * u * u * u) / kTwoPi;
    };
    w.omega1 = [](double u, double, double) { return -0.5 * u * u; };
    w.domega0 = [](double u, double, double th) {
        return (1.0 + 0.5 * std::sin(th)) * (1.0 + 0.3 * u * u) / kTwoPi;
    };
    w.domega1 = [](double u, double, double) { return -u; };
    return w;
}

SpacetimeDiffeo shear_diffeo(double rate) {
    SpacetimeDiffeo d;
    d.name = "shear";
    d.forward = [rate](double t, double th) {
        return std::pair<double, double>(t, th + rate * t);
    };
    d.inverse = [rate](double t, double th) {
        return std::pair<double, double>(t, th - rate * t);
    };
    d.jacobian = [rate](double, double) {
        return std::array<double, 4>{1.0, 0.0, rate, 1.0};
    };
    return d;
}

SpacetimeDiffeo theta_reparametrization(double amplitude) {
    if (!(std::abs(amplitude) < 1.0))
        throw ConfigError("theta_reparametrization: |amplitude| must be < 1");
    SpacetimeDiffeo d;
    d.name = "theta-reparam";
    d.forward = [amplitude](double t, double th) {
        return std::pair<double, double>(t, th + amplitude * std::sin(th));
    };
    d.inverse = [amplitude](double t, double th) {
        // Invert theta + a sin(theta) = th by Newton (contraction for |a| < 1).
        double x = th;
        for (int it = 0; it < 60; ++it) {
            const double g = x + amplitude * std::sin(x) - th;
            const double dg = 1.0 + amplitude * std::cos(x);
            const double step = g / dg;
            x -= step;
            if (std::abs(step) < 1e-14) break;
        }
        return std::pair<double, double>(t, x);
    };
    d.jacobian = [amplitude](double, double th) {
        return std::array<double, 4>{1.0, 0.0, 0.0, 1.0 + amplitude * std::cos(th)};
    };
    return d;
}

FluxField1Form preset_flux(const std::string& name) {
    if (name == "flat-burgers") return flat_burgers_flux();
    if (name == "variable-coefficient") return variable_coefficient_flux();
    if (name == "pullback-shear")
        return pullback_flux(variable_coefficient_flux(), shear_diffeo(0.3), 2.0);
    throw ConfigError("unknown flux preset \"" + name + "\"");
}

}  // namespace fvlab::spacetime
