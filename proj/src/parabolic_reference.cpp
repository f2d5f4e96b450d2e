#include "fvlab/parabolic_reference.hpp"

#include <cmath>

#include "fvlab/errors.hpp"

namespace fvlab {

double regularized_en2_flux(double h, double dh_dx,
                            const std::function<double(double)>& kappa,
                            double delta) {
    if (!(h > 0.0)) throw InvariantError("regularized_en2_flux: h <= 0");
    if (!(delta > 0.0)) throw ConfigError("regularized_en2_flux: delta must be > 0");
    return std::sqrt(h) / kappa(h) * dh_dx /
           std::sqrt(std::max(std::abs(dh_dx), delta));
}

ParabolicProblem closed_form_effective(const RelaxationModel& model,
                                       double en2_delta) {
    ParabolicProblem p;
    p.name = model.name() + "-effective";
    p.dim = model.equilibrium_dim();

    if (model.relaxation_exponent() == 1) {
        const RelaxationModel* m = &model;
        p.interface_flux = [m](const Vec& uL, const Vec& uR, double dx) {
            return Vec(m->closed_form_diffusion(0.5 * (uL + uR)) * (uR - uL) / dx);
        };
        p.max_coefficient = [m](const Mat& field, double) {
            double c = 0.0;
            for (Eigen::Index i = 0; i < field.cols(); ++i) {
                const Eigen::Index j = (i + 1) % field.cols();
                const Mat M = m->closed_form_diffusion(
                    0.5 * (field.col(i) + field.col(j)));
                c = std::max(c, M.cwiseAbs().rowwise().sum().maxCoeff());
            }
            return c;
        };
        return p;
    }

    if (model.name() != "shallow-water-friction")
        throw ConfigError(model.name() + ": no closed-form effective equation");

    // Recover g and kappa from the model's closed forms (see
    // nonlinear_relaxation_coefficient for the same extraction).
    Vec uref = Vec::Constant(1, 1.0);
    const Vec Eu = model.equilibrium_lift(uref);
    const double g = model.flux_jacobian(Eu)(1, 0) / uref[0];
    Vec probe(2);
    probe << 1.0, 1.0;
    const double kappa0 = std::sqrt(model.relaxation(probe)[1] / g);
    auto kappa = [kappa0](double h) { return kappa0 / h; };

    p.interface_flux = [kappa, en2_delta](const Vec& uL, const Vec& uR,
                                          double dx) {
        const double h = 0.5 * (uL[0] + uR[0]);
        const double s = (uR[0] - uL[0]) / dx;
        return Vec::Constant(1, regularized_en2_flux(h, s, kappa, en2_delta));
    };
    p.max_coefficient = [kappa, en2_delta](const Mat& field, double dx) {
        double c = 0.0;
        for (Eigen::Index i = 0; i < field.cols(); ++i) {
            const Eigen::Index j = (i + 1) % field.cols();
            const double h = 0.5 * (field(0, i) + field(0, j));
            const double s = std::abs(field(0, j) - field(0, i)) / dx;
            const double base = std::sqrt(h) / kappa(h);
            // Slope of s -> s / sqrt(max(|s|, delta)).
            const double lin = (s <= en2_delta) ? 1.0 / std::sqrt(en2_delta)
                                                : 0.5 / std::sqrt(s);
            c = std::max(c, base * lin);
        }
        return c;
    };
    return p;
}

Mat solve_parabolic(const ParabolicProblem& problem, Mat u0, double T,
                    double dx, double safety) {
    if (!(T >= 0.0)) throw ConfigError("solve_parabolic: T must be >= 0");
    if (!(dx > 0.0)) throw ConfigError("solve_parabolic: dx must be > 0");
    if (!(safety > 0.0 && safety < 1.0))
        throw ConfigError("solve_parabolic: safety must lie in (0, 1)");

    const int cells = static_cast<int>(u0.cols());
    const int n = static_cast<int>(u0.rows());
    Mat flux(n, cells);
    double t = 0.0;
    while (t < T * (1.0 - 1e-14)) {
        const double cmax = problem.max_coefficient(u0, dx);
        double dt = (cmax > 0.0) ? safety * dx * dx / cmax : (T - t);
        if (t + dt > T) dt = T - t;

        for (int i = 0; i < cells; ++i) {
            const int j = (i + 1) % cells;
            flux.col(i) = problem.interface_flux(u0.col(i), u0.col(j), dx);
        }
        for (int i = 0; i < cells; ++i) {
            const int m = (i + cells - 1) % cells;
            u0.col(i) += dt / dx * (flux.col(i) - flux.col(m));
        }
        if (!u0.allFinite())
            throw NumericalError("solve_parabolic: non-finite state at t = " +
                                 std::to_string(t));
        t += dt;
    }
    return u0;
}

}  // namespace fvlab
