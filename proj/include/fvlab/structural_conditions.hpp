#pragma once

#include <string>
#include <vector>

#include "fvlab/relaxation_model.hpp"

namespace fvlab {

// One line of the structural-condition report: worst residual observed over
// the sample set against the stated tolerance. Entries for entropy
// conditions are marked not applicable when the model has no entropy pair.
struct ConditionEntry {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool applicable = true;
    bool pass = true;
    std::string note;
};

struct ConditionReport {
    std::string model;
    int samples = 0;
    std::uint64_t seed = 0;
    std::vector<ConditionEntry> entries;

    bool all_pass() const;
    const ConditionEntry* find(const std::string& name) const;
    std::string to_string() const;
};

// Seeded numerical verification of the structural framework on the model's
// documented sampling boxes:
//   condition1:  Q R(U) = 0                                (<= 1e-10)
//   condition2:  R(E(u)) = 0 and Q E(u) = u                (<= 1e-10)
//   condition3:  Q F(E(u)) = 0                             (<= 1e-10)
//   condition4:  dim ker B(E(u)) = n, ker ∩ im = {0}       (SVD rank tests)
//   condition5:  D_U Phi A = D_U Psi, Hessian PD on M      (<= 1e-6, entropy)
//   condition6:  D_U Phi R >= 0, D_U Phi(E(u)) = nu(u) Q   (entropy)
// plus finite-difference cross-checks of the analytic Jacobians (<= 1e-6
// relative). Failures are reported, never thrown.
ConditionReport verify_structural_conditions(const RelaxationModel& model,
                                             int sample_count,
                                             std::uint64_t seed);

// Residual of the nonlinear relaxation scaling
//   || R(E(u) + eps V) - eps^q R(E(u) + M(eps) V) ||_inf.
// Zero (to round-off) for the shallow water model with q = 2 and
// M(eps) = diag(eps, 1); zero for every model at eps = 1.
double nonlinear_scaling_check(const RelaxationModel& model, double eps,
                               const Vec& V, const Vec& u);

}  // namespace fvlab
