#include "fvlab/chapman_enskog.hpp"

#include <cmath>

#include "fvlab/errors.hpp"

namespace fvlab {

Vec constrained_generalized_inverse(const Mat& C, const Mat& Q, const Vec& J) {
    const Eigen::Index N = C.rows();
    const Eigen::Index n = Q.rows();
    if (C.cols() != N || Q.cols() != N || J.size() != N)
        throw ConfigError("constrained_generalized_inverse: dimension mismatch");

    const double jscale = std::max(1.0, inf_norm(J));
    if (inf_norm(Vec(Q * J)) > 1e-12 * jscale)
        throw InvariantError(
            "constrained_generalized_inverse: right-hand side violates Q J = 0");

    Mat A(N + n, N);
    A.topRows(N) = C;
    A.bottomRows(n) = Q;
    Vec b = Vec::Zero(N + n);
    b.head(N) = J;

    const Vec V = A.colPivHouseholderQr().solve(b);
    const double res_eq = inf_norm(Vec(C * V - J));
    const double res_con = inf_norm(Vec(Q * V));
    if (res_eq > 1e-10 * jscale || res_con > 1e-10 * std::max(1.0, inf_norm(V)))
        throw NumericalError(
            "constrained_generalized_inverse: bordered system is singular "
            "(kernel structure violated at this state)");
    return V;
}

CorrectorSolution first_order_corrector(const RelaxationModel& model,
                                        const Vec& u, const Vec& du_dx) {
    model.require_equilibrium(u);
    const Vec Eu = model.equilibrium_lift(u);
    const Mat A = model.flux_jacobian(Eu);
    const Mat B = model.relaxation_jacobian(Eu);
    const Mat& Q = model.conserved_projector();

    const Vec dxF = A * (model.lift_jacobian(u) * du_dx);
    CorrectorSolution sol;
    sol.U1 = constrained_generalized_inverse(B, Q, -dxF);
    sol.constraint_residual = inf_norm(Vec(Q * sol.U1));
    sol.equation_residual = inf_norm(Vec(B * sol.U1 + dxF));
    return sol;
}

EffectiveDiffusion effective_diffusion_matrix(const RelaxationModel& model,
                                              const Vec& u) {
    if (model.relaxation_exponent() != 1)
        throw ConfigError(model.name() +
                          ": effective_diffusion_matrix applies to q = 1 models "
                          "only; use closed_form_effective for the nonlinear "
                          "late-time limit");
    model.require_equilibrium(u);

    const Vec Eu = model.equilibrium_lift(u);
    const Mat A = model.flux_jacobian(Eu);
    const Mat& Q = model.conserved_projector();
    const int n = model.equilibrium_dim();

    EffectiveDiffusion eff;
    eff.u = u;
    eff.M.resize(n, n);
    for (int j = 0; j < n; ++j) {
        const CorrectorSolution sol =
            first_order_corrector(model, u, Vec::Unit(n, j));
        eff.M.col(j) = -(Q * (A * sol.U1));
    }

    if (const EntropyPair* ent = model.entropy()) {
        const Mat B = model.relaxation_jacobian(Eu);
        eff.S = Q * A;
        eff.Lcal = ent->entropy_hessian(Eu) * B;
        eff.L.resize(n, n);
        for (int j = 0; j < n; ++j) {
            const Vec col = eff.S.transpose().col(j);
            eff.L.col(j) = eff.S * constrained_generalized_inverse(eff.Lcal, Q, col);
        }
    }
    return eff;
}

NonlinearCoefficient nonlinear_relaxation_coefficient(
    const RelaxationModel& model, const Vec& u, const Vec& du_dx) {
    if (model.name() != "shallow-water-friction")
        throw ConfigError("nonlinear_relaxation_coefficient: defined for the "
                          "shallow water model only");
    model.require_equilibrium(u);
    const double h = u[0];
    const double dh = du_dx[0];

    const Vec Eu = model.equilibrium_lift(u);
    // Extract g and kappa(h) from the closed forms: A(E(u))_{21} = g h at
    // equilibrium, and R_2(h, 1) = kappa(h)^2 g.
    const double g = model.flux_jacobian(Eu)(1, 0) / h;
    Vec probe(2);
    probe << h, 1.0;
    const double kappa = std::sqrt(model.relaxation(probe)[1] / g);

    NonlinearCoefficient out;
    out.c = g * kappa * std::sqrt(h * std::abs(dh));

    // beta solves kappa^2 g beta |beta| = d_x p(h) = g h d_x h, i.e. the
    // profile U1bar = (0, beta) carried by the nonlinear corrector.
    const double beta =
        ((dh >= 0.0) ? 1.0 : -1.0) * std::sqrt(h * std::abs(dh)) / kappa;
    Vec U1bar(2);
    U1bar << 0.0, beta;
    const Vec shifted = Eu + model.scaling_matrix(0.0) * U1bar;
    out.identity_residual =
        inf_norm(Vec(model.relaxation(shifted) - out.c * U1bar));
    return out;
}

}  // namespace fvlab
