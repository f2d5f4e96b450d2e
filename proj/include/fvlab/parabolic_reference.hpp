#pragma once

#include "fvlab/relaxation_model.hpp"

namespace fvlab {

// One effective parabolic system d_t u = d_x G(u, d_x u) in divergence form
// on a periodic grid. `interface_flux` returns G at the interface between
// two cells; `max_coefficient` bounds the effective diffusion coefficient of
// the current field for the explicit stability restriction.
struct ParabolicProblem {
    std::string name;
    int dim = 1;
    std::function<Vec(const Vec& uL, const Vec& uR, double dx)> interface_flux;
    std::function<double(const Mat& field, double dx)> max_coefficient;
};

// Regularized flux of the fully nonlinear shallow-water limit:
//   (sqrt(h) / kappa(h)) * dh_dx / sqrt(max(|dh_dx|, delta)).
// The limit equation is genuinely singular at dh_dx = 0; delta is a
// numerical device, configurable and documented.
double regularized_en2_flux(double h, double dh_dx,
                            const std::function<double(double)>& kappa,
                            double delta);

// Closed-form effective equation of a model, packaged for solve_parabolic:
// matrix-diffusion form M(u_interface) (u_R - u_L)/dx for the q = 1 models,
// the regularized nonlinear flux for shallow water.
ParabolicProblem closed_form_effective(const RelaxationModel& model,
                                       double en2_delta = 1e-8);

// Explicit conservative integration to exactly time T (last step shortened),
// with dt = safety * dx^2 / max_coefficient re-evaluated each step.
// Conserves the cell sum of every component to round-off. Throws
// NumericalError on NaN/overflow.
Mat solve_parabolic(const ParabolicProblem& problem, Mat u0, double T,
                    double dx, double safety = 0.45);

}  // namespace fvlab
