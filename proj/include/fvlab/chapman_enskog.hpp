#pragma once

#include "fvlab/relaxation_model.hpp"

namespace fvlab {

// First-order corrector U1 of the Chapman-Enskog expansion
// U = E(u) + eps U1 + ..., characterized by
//   B(E(u)) U1 = -d_x(F(E(u))),   Q U1 = 0.
struct CorrectorSolution {
    Vec U1;
    double constraint_residual = 0.0;  // ||Q U1||_inf
    double equation_residual = 0.0;    // ||B U1 + d_x F(E(u))||_inf
};

// Effective-diffusion data at one equilibrium state u:
//   M     n x n effective diffusion matrix of d_t u = d_x(M(u) d_x u)
//   S     Q A(E(u))
//   Lcal  D^2_U Phi(E(u)) B(E(u))
//   L     S Lcal^{-1} S^T with the constrained generalized inverse
// S, Lcal, L are empty unless the model carries an entropy pair.
struct EffectiveDiffusion {
    Vec u;
    Mat M;
    Mat S;
    Mat Lcal;
    Mat L;
};

// Unique solution V of C V = J, Q V = 0 under the kernel conditions
// dim ker C = n, ker C ∩ im C = {0}, rank Q = n. Solved as the bordered
// least-squares system [[C],[Q]] V = (J, 0); both residuals must come out
// <= 1e-10 or the kernel structure is broken at this state. Requires
// Q J = 0 (within 1e-12).
Vec constrained_generalized_inverse(const Mat& C, const Mat& Q, const Vec& J);

// Corrector for equilibrium profile u(x) with prescribed gradient du_dx:
// d_x(F(E(u))) = A(E(u)) D_u E(u) du_dx.
CorrectorSolution first_order_corrector(const RelaxationModel& model,
                                        const Vec& u, const Vec& du_dx);

// Assembles M(u) column by column from corrector solves with unit gradients,
// M e_j = -Q A(E(u)) U1(e_j), and the entropy-structure matrices when
// available. Only q = 1 models admit the linear form; q > 1 throws.
EffectiveDiffusion effective_diffusion_matrix(const RelaxationModel& model,
                                              const Vec& u);

// Nonlinear relaxation coefficient of the shallow water model:
// c(u) = g kappa(h) sqrt(h |d_x h|), with the defining identity
// R(E(u) + M(0) U1bar) = c(u) U1bar, U1bar = (0, beta), verified on the
// spot; the residual of that identity is reported alongside.
struct NonlinearCoefficient {
    double c = 0.0;
    double identity_residual = 0.0;
};
NonlinearCoefficient nonlinear_relaxation_coefficient(
    const RelaxationModel& model, const Vec& u, const Vec& du_dx);

}  // namespace fvlab
