#pragma once

#include <cstdint>
#include <vector>

#include "fvlab/grid1d.hpp"

namespace fvlab {

// ============================================================================
// Tuning matrices
// ============================================================================

// alpha = (I + (gamma dx / 2b) (I + sigma))^{-1}; gamma = 0 gives the
// identity. Throws ConfigError when the matrix to invert is singular.
Mat alpha_matrix(double gamma, double dx, double b, const Mat& sigma);

// Interface tuning matrix built from the target effective diffusion: with
// Mhat = M((uL + uR)/2) the construction places b^2 Mhat^{-1} on the
// Q-adapted conserved block and the identity elsewhere, so that
//   Q (I + sigma)^{-1} = Mhat Q / b^2      (commutation condition).
// Eigenvalues of Mhat are clamped below at `diffusion_floor` (the paper
// leaves degenerate M(u) unspecified). Throws ConfigError when
// b^2 Mhat^{-1} - I is ill-conditioned; a larger b fixes that.
struct SigmaConstruction {
    Mat sigma;  // N x N
    Mat Mhat;   // n x n
};
SigmaConstruction sigma_from_target_diffusion(const RelaxationModel& model,
                                              const Vec& uL, const Vec& uR,
                                              double b,
                                              double diffusion_floor = 1e-8);

// Starred states of the modified Riemann solver at one interface:
//   U*L = alpha Ustar + (I - alpha)(UL - Rbar(UL)),
//   U*R = alpha Ustar + (I - alpha)(UR - Rbar(UR)),
// with Rbar(U) = (I + sigma)^{-1} R(U) and Ustar the HLL intermediate state.
std::pair<Vec, Vec> modified_interface_states(const RelaxationModel& model,
                                              const Vec& UL, const Vec& UR,
                                              double b, const Mat& alpha,
                                              const Mat& sigma);

// ============================================================================
// The asymptotic-preserving scheme
// ============================================================================

enum class SigmaRule {
    TargetDiffusion,  // commutation construction from the closed-form M(u)
    Zero,             // sigma = 0 (used for the nonlinear q = 2 variant)
};

struct APConfig {
    double eps = 1.0;  // in (0, 1]
    double b = 1.0;    // wave speed, > 0
    SigmaRule sigma_rule = SigmaRule::TargetDiffusion;
    double diffusion_floor = 1e-8;
    // When > 0, run_ap uses this wave speed instead of the 1.1 x spectral
    // radius rule and fails (NumericalError) if it ever falls below the
    // spectral radius of the data: monotonicity of the solver needs
    // b >= rho(A).
    double fixed_b = 0.0;
    // Test hook: disables the relaxation source and forces alpha = I, which
    // must reproduce step_homogeneous exactly.
    bool relaxation_enabled = true;

    void validate() const;
};

// One update of the late-time scheme
//
//   U_i^{m+1} = U_i^m
//     - (dt/(eps dx)) (alpha_{i+1/2} F_{i+1/2} - alpha_{i-1/2} F_{i-1/2})
//     + (dt/(eps dx)) (alpha_{i+1/2} - alpha_{i-1/2}) F(U_i^m)
//     - (dt/(2 eps^{q+1})) (alpha_{i+1/2} + alpha_{i-1/2}) R(U_i^m)
//
// with F the HLL fluxes and alpha built with gamma = 1/eps^q. `dt` is the
// late-time advance of the step; the executed Riemann-fan step is
// ds = dt / eps and must satisfy the hyperbolic CFL b ds / dx <= 1/2 (the
// scheme integrates non-interacting fans over ds; this is the only
// restriction, there is no dt ~ dx^2 condition).
DiscreteField ap_step(const RelaxationModel& model, const DiscreteField& field,
                      const APConfig& cfg, double dt);

// Limit scheme of the discrete asymptotics:
//   u_i^{m+1} = u_i + (dt/dx^2) (M_{i+1/2}(u_{i+1} - u_i) + M_{i-1/2}(u_{i-1} - u_i))
// with M at interface means. Used as the oracle for the AP limit; explicit,
// so it enforces dt max||M|| / dx^2 <= 1/2.
Mat discrete_asymptotic_step(const RelaxationModel& model, const Mat& u_field,
                             double dt, double dx,
                             double diffusion_floor = 1e-8);

// Evaluates every starred state of the field under cfg and reports those
// outside the admissible set. Diagnostic only; never throws.
struct InvariantDomainReport {
    struct Violation {
        int interface_index;
        char side;  // 'L' or 'R'
        std::string constraint;
    };
    std::vector<Violation> violations;
    bool empty() const { return violations.empty(); }
};
InvariantDomainReport ap_invariant_domain_check(const RelaxationModel& model,
                                                const DiscreteField& field,
                                                const APConfig& cfg);

// Total entropy dx * sum_i Phi(U_i^m) for each stored step of a trajectory.
std::vector<double> entropy_monotonicity_diagnostic(
    const RelaxationModel& model, const std::vector<DiscreteField>& trajectory);
double total_entropy(const RelaxationModel& model, const DiscreteField& field);

// ============================================================================
// Driver
// ============================================================================

// Advances the field to late time T with per-step dt = eps * cfl * dx / (2 b)
// and b re-evaluated each step from the 1.1 x spectral-radius rule (the
// final step is shortened to land on T). The observer, when set, sees every
// accepted state including the initial one.
struct APRunResult {
    DiscreteField final_state;
    std::int64_t steps = 0;
    double b_last = 0.0;
};
APRunResult run_ap(const RelaxationModel& model, DiscreteField field,
                   APConfig cfg, double final_time, double cfl = 1.0,
                   const std::function<void(const DiscreteField&)>& observer = {});

}  // namespace fvlab
