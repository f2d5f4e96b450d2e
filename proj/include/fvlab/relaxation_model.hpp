#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "fvlab/numerics.hpp"

namespace fvlab {

// Entropy pair (Phi, Psi) compatible with the relaxation, together with the
// analytic gradient/Hessian of Phi and the equilibrium multiplier nu with
// D_U Phi(E(u)) = nu(u) Q.
class EntropyPair {
public:
    virtual ~EntropyPair() = default;
    virtual double entropy(const Vec& U) const = 0;
    virtual double entropy_flux(const Vec& U) const = 0;
    virtual Vec entropy_gradient(const Vec& U) const = 0;
    virtual Mat entropy_hessian(const Vec& U) const = 0;
    virtual Vec multiplier(const Vec& u) const = 0;
};

// One hyperbolic system with stiff relaxation,
//
//     eps d_t U + d_x F(U) = -R(U) / eps^q,
//
// described by its flux F, relaxation R, conserved projector Q (n x N, full
// rank), equilibrium lift E with R(E(u)) = 0 and Q E(u) = u, analytic
// Jacobians A = D_U F and B = D_U R, the admissible set, and (optionally) an
// entropy pair. Models are immutable after construction and safe to share
// across threads; every operation is a pure function of its inputs.
class RelaxationModel {
public:
    virtual ~RelaxationModel() = default;

    virtual const std::string& name() const = 0;
    virtual int state_dim() const = 0;        // N
    virtual int equilibrium_dim() const = 0;  // n
    virtual const Mat& conserved_projector() const = 0;  // Q

    virtual Vec flux(const Vec& U) const = 0;
    virtual Vec relaxation(const Vec& U) const = 0;
    virtual Vec equilibrium_lift(const Vec& u) const = 0;
    virtual Mat flux_jacobian(const Vec& U) const = 0;        // A
    virtual Mat relaxation_jacobian(const Vec& U) const = 0;  // B
    virtual Mat lift_jacobian(const Vec& u) const = 0;        // D_u E, N x n

    // Admissibility predicate for Omega. Boundaries (rho = 0, h = 0,
    // |f/e| = 1) are excluded strictly with a 1e-13 guard band; Jacobians
    // degenerate there. The violation string names the broken constraint.
    virtual bool admissible(const Vec& U) const = 0;
    virtual std::string admissibility_violation(const Vec& U) const = 0;
    void require_admissible(const Vec& U) const;

    virtual bool equilibrium_admissible(const Vec& u) const = 0;
    void require_equilibrium(const Vec& u) const;

    // Nonlinear relaxation scale: R(E(u) + eps V) = eps^q R(E(u) + M(eps) V).
    // q = 1 and M(eps) = I unless a model overrides both.
    virtual int relaxation_exponent() const { return 1; }
    virtual Mat scaling_matrix(double /*eps*/) const;

    virtual const EntropyPair* entropy() const { return nullptr; }

    // Upper bound on the spectral radius of A(U).
    virtual double max_wave_speed(const Vec& U) const = 0;

    // Closed-form effective diffusion matrix M(u) of the late-time limit
    // d_t u = d_x(M(u) d_x u). Only meaningful for q = 1 models; q > 1
    // models throw ConfigError.
    virtual Mat closed_form_diffusion(const Vec& u) const = 0;

    // Seeded sampling of the documented admissible / equilibrium boxes used
    // by the structural-condition checks.
    virtual Vec sample_state(std::mt19937_64& rng) const = 0;
    virtual Vec sample_equilibrium(std::mt19937_64& rng) const = 0;

    // Batch helpers for the time-stepping hot loops; columns are states.
    // Defaults loop over the scalar forms; models override where it matters.
    virtual void flux_batch(const Mat& states, Mat& out) const;
    virtual void relaxation_batch(const Mat& states, Mat& out) const;
    virtual double max_wave_speed_batch(const Mat& states) const;
    // Scalar effective-diffusion fast path for n = 1 models (hot AP loop).
    virtual bool scalar_diffusion(double /*u*/, double& /*m_out*/) const { return false; }
};

// Eddington factor chi(xi) = (3 + 4 xi^2) / (5 + 2 sqrt(4 - 3 xi^2)) of the
// M1 closure, with chi(0) = 1/3 and chi(+-1) = 1. Requires |xi| <= 1.
double eddington_factor(double xi);
double eddington_factor_derivative(double xi);

// Registry of the four built-in models. Parameter overrides (missing keys
// take the documented defaults):
//   euler-friction:          kappa (1), gamma (2)
//   m1:                      (none)
//   euler-m1:                kappa (1), sigma (1), C_p (0.01), eta (1.5)
//   shallow-water-friction:  gravity (1), kappa0 (1)
std::unique_ptr<RelaxationModel> make_model(
    const std::string& name,
    const std::vector<std::pair<std::string, double>>& params = {});

std::vector<std::string> model_names();

}  // namespace fvlab
