#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fvlab/chapman_enskog.hpp"
#include "fvlab/errors.hpp"
#include "fvlab/numerics.hpp"

using namespace fvlab;

TEST_CASE("constrained generalized inverse on hand-solvable systems") {
    SUBCASE("2x2 diagonal") {
        Mat C = Mat::Zero(2, 2);
        C(1, 1) = 1.0;
        Mat Q = Mat::Zero(1, 2);
        Q(0, 0) = 1.0;
        Vec J(2);
        J << 0.0, -4.0;
        const Vec V = constrained_generalized_inverse(C, Q, J);
        CHECK(V[0] == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(V[1] == doctest::Approx(-4.0).epsilon(1e-13));
    }
    SUBCASE("radiative-transfer kernel at tau = 1") {
        Mat C(3, 3);
        C << 1, 0, -4, 0, 1, 0, -1, 0, 4;
        Mat Q(1, 3);
        Q << 1, 0, 1;
        Vec J(3);
        J << 0.0, 4.0 / 3.0, 0.0;
        const Vec V = constrained_generalized_inverse(C, Q, J);
        CHECK(std::abs(V[0]) <= 1e-12);
        CHECK(V[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
        CHECK(std::abs(V[2]) <= 1e-12);
    }
    SUBCASE("zero right-hand side has the zero solution") {
        Mat C(2, 2);
        C << 0, 0, 0, 1;
        Mat Q(1, 2);
        Q << 1, 0;
        const Vec V = constrained_generalized_inverse(C, Q, Vec::Zero(2));
        CHECK(inf_norm(V) <= 1e-14);
    }
    SUBCASE("Q J != 0 is a precondition violation") {
        Mat C(2, 2);
        C << 0, 0, 0, 1;
        Mat Q(1, 2);
        Q << 1, 0;
        Vec J(2);
        J << 1.0, 0.0;
        CHECK_THROWS_AS(constrained_generalized_inverse(C, Q, J),
                        InvariantError);
    }
    SUBCASE("broken kernel structure is detected") {
        // C singular with a 2-dimensional kernel but Q of rank 1.
        Mat C = Mat::Zero(2, 2);
        Mat Q(1, 2);
        Q << 1, 0;
        Vec J(2);
        J << 0.0, 1.0;
        CHECK_THROWS_AS(constrained_generalized_inverse(C, Q, J),
                        NumericalError);
    }
}

TEST_CASE("first-order corrector closed forms") {
    SUBCASE("euler-friction: U1 = (0, -dx p(rho))") {
        const auto model = make_model("euler-friction");  // p = rho^2
        const CorrectorSolution sol = first_order_corrector(
            *model, Vec::Constant(1, 1.0), Vec::Constant(1, 2.0));
        CHECK(sol.U1[0] == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(sol.U1[1] == doctest::Approx(-4.0).epsilon(1e-12));
        CHECK(sol.constraint_residual <= 1e-12);
        CHECK(sol.equation_residual <= 1e-10);
    }
    SUBCASE("m1: U1 = (0, -(4/3) tau^3 dx tau, 0)") {
        // tau = 1, dx tau = 1, so u = 2 and du/dx = (1 + 4 tau^3) dx tau = 5.
        const auto model = make_model("m1");
        const CorrectorSolution sol = first_order_corrector(
            *model, Vec::Constant(1, 2.0), Vec::Constant(1, 5.0));
        CHECK(std::abs(sol.U1[0]) <= 1e-12);
        CHECK(sol.U1[1] == doctest::Approx(-4.0 / 3.0).epsilon(1e-12));
        CHECK(std::abs(sol.U1[2]) <= 1e-12);
    }
    SUBCASE("zero gradient gives the zero corrector") {
        const auto model = make_model("euler-m1");
        Vec u(2);
        u << 1.3, 0.8;
        const CorrectorSolution sol =
            first_order_corrector(*model, u, Vec::Zero(2));
        CHECK(inf_norm(sol.U1) <= 1e-14);
    }
    SUBCASE("euler-m1 matches the closed-form corrector") {
        // U1 = (0, (-dx p - dx e / 3)/kappa, 0, -(dx e)/(3 sigma)).
        const auto model = make_model(
            "euler-m1", {{"kappa", 2.0}, {"sigma", 0.5}, {"C_p", 1.0}, {"eta", 2.0}});
        Vec u(2), du(2);
        u << 1.0, 1.5;
        du << 0.3, -0.6;
        const double dx_p = 2.0 * u[0] * du[0];  // p = rho^2
        const CorrectorSolution sol = first_order_corrector(*model, u, du);
        CHECK(std::abs(sol.U1[0]) <= 1e-13);
        CHECK(sol.U1[1] ==
              doctest::Approx((-dx_p - du[1] / 3.0) / 2.0).epsilon(1e-12));
        CHECK(std::abs(sol.U1[2]) <= 1e-13);
        CHECK(sol.U1[3] == doctest::Approx(-du[1] / (3.0 * 0.5)).epsilon(1e-12));
    }
}

TEST_CASE("effective diffusion matrices match the closed forms") {
    SUBCASE("euler-friction: M = p'(rho)") {
        const auto model = make_model("euler-friction");
        const EffectiveDiffusion eff =
            effective_diffusion_matrix(*model, Vec::Constant(1, 1.5));
        CHECK(eff.M(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("m1 at tau = 1: M = 4/15 in the u variable") {
        const auto model = make_model("m1");
        const EffectiveDiffusion eff =
            effective_diffusion_matrix(*model, Vec::Constant(1, 2.0));
        CHECK(eff.M(0, 0) == doctest::Approx(4.0 / 15.0).epsilon(1e-10));
    }
    SUBCASE("euler-m1 with p = rho^2, kappa = sigma = 1") {
        const auto model =
            make_model("euler-m1", {{"C_p", 1.0}, {"eta", 2.0}});
        Vec u(2);
        u << 1.0, 1.0;
        const EffectiveDiffusion eff = effective_diffusion_matrix(*model, u);
        CHECK(eff.M(0, 0) == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(eff.M(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
        CHECK(std::abs(eff.M(1, 0)) <= 1e-10);
        CHECK(eff.M(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    }
    SUBCASE("q = 2 models are rejected") {
        const auto sw = make_model("shallow-water-friction");
        CHECK_THROWS_AS(effective_diffusion_matrix(*sw, Vec::Constant(1, 1.0)),
                        ConfigError);
    }
}

TEST_CASE("property: assembled M agrees with closed_form_diffusion at 50 "
          "seeded equilibria") {
    for (const std::string name : {"euler-friction", "m1", "euler-m1"}) {
        const auto model = make_model(name);
        std::mt19937_64 rng(99);
        for (int i = 0; i < 50; ++i) {
            const Vec u = model->sample_equilibrium(rng);
            const EffectiveDiffusion eff = effective_diffusion_matrix(*model, u);
            const Mat closed = model->closed_form_diffusion(u);
            const double rel = inf_norm(Mat(eff.M - closed)) /
                               std::max(1.0, inf_norm(closed));
            INFO(name, " at u = ", u.transpose());
            CHECK(rel <= 1e-8);
        }
    }
}

TEST_CASE("entropy structure of the effective system (euler-friction)") {
    const auto model = make_model("euler-friction");
    std::mt19937_64 rng(123);
    for (int i = 0; i < 50; ++i) {
        const Vec u = model->sample_equilibrium(rng);
        const EffectiveDiffusion eff = effective_diffusion_matrix(*model, u);

        // L = S Lcal^{-1} S^T is symmetric positive semidefinite.
        CHECK(inf_norm(Mat(eff.L - eff.L.transpose())) <= 1e-10);
        Eigen::SelfAdjointEigenSolver<Mat> eig(
            Mat(0.5 * (eff.L + eff.L.transpose())));
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10);

        // The two forms of the effective flux agree: M(u) du = L(u) d(D_u
        // Phi(E(u)))^T for any prescribed du. The lift is linear here, so the
        // reduced entropy Hessian is exactly Dlift^T Hess(Phi) Dlift.
        const Vec Eu = model->equilibrium_lift(u);
        const Mat Dlift = model->lift_jacobian(u);
        const Mat hess_red =
            Dlift.transpose() * model->entropy()->entropy_hessian(Eu) * Dlift;
        const Vec du = Vec::Constant(1, 0.7);
        const Vec lhs = eff.M * du;
        const Vec rhs = eff.L * (hess_red * du);
        CHECK(inf_norm(Vec(lhs - rhs)) / std::max(1.0, inf_norm(lhs)) <= 1e-8);
    }
}

TEST_CASE("Lcal = Hess(Phi) B is positive semidefinite at equilibrium") {
    for (const std::string name : {"euler-friction", "shallow-water-friction"}) {
        const auto model = make_model(name);
        std::mt19937_64 rng(17);
        for (int i = 0; i < 10; ++i) {
            const Vec u = model->sample_equilibrium(rng);
            const Vec Eu = model->equilibrium_lift(u);
            const Mat lcal = model->entropy()->entropy_hessian(Eu) *
                             model->relaxation_jacobian(Eu);
            std::uniform_real_distribution<double> unif(-1.0, 1.0);
            for (int k = 0; k < 100; ++k) {
                Vec x(model->state_dim());
                for (int c = 0; c < model->state_dim(); ++c) x[c] = unif(rng);
                CHECK(x.dot(lcal * x) >= -1e-10);
            }
        }
    }
}

TEST_CASE("equilibrium entropy flux is constant in u (finite differences)") {
    for (const std::string name : {"euler-friction", "shallow-water-friction"}) {
        const auto model = make_model(name);
        std::mt19937_64 rng(31);
        for (int i = 0; i < 20; ++i) {
            const Vec u = model->sample_equilibrium(rng);
            auto psi_of_u = [&](const Vec& w) {
                return model->entropy()->entropy_flux(model->equilibrium_lift(w));
            };
            CHECK(inf_norm(fd_gradient(psi_of_u, u, 1e-5)) <= 1e-6);
        }
    }
}

TEST_CASE("nonlinear relaxation coefficient of the shallow water model") {
    SUBCASE("kappa(h) = 1/h, g = 1, h = 4, dx h = 1") {
        const auto sw = make_model("shallow-water-friction");
        const NonlinearCoefficient nc = nonlinear_relaxation_coefficient(
            *sw, Vec::Constant(1, 4.0), Vec::Constant(1, 1.0));
        CHECK(nc.c == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(nc.identity_residual <= 1e-10);
    }
    SUBCASE("flat state has c = 0") {
        const auto sw = make_model("shallow-water-friction");
        const NonlinearCoefficient nc = nonlinear_relaxation_coefficient(
            *sw, Vec::Constant(1, 1.0), Vec::Constant(1, 0.0));
        CHECK(nc.c == 0.0);
        CHECK(nc.identity_residual <= 1e-12);
    }
    SUBCASE("g = 9.81") {
        const auto sw =
            make_model("shallow-water-friction", {{"gravity", 9.81}});
        const NonlinearCoefficient nc = nonlinear_relaxation_coefficient(
            *sw, Vec::Constant(1, 1.0), Vec::Constant(1, 1.0));
        CHECK(nc.c == doctest::Approx(9.81).epsilon(1e-12));
        CHECK(nc.identity_residual <= 1e-10);
    }
    SUBCASE("negative gradients carry the sign through the identity") {
        const auto sw = make_model("shallow-water-friction");
        const NonlinearCoefficient nc = nonlinear_relaxation_coefficient(
            *sw, Vec::Constant(1, 2.0), Vec::Constant(1, -0.7));
        CHECK(nc.c >= 0.0);
        CHECK(nc.identity_residual <= 1e-10);
    }
    SUBCASE("only the shallow water model is supported") {
        const auto euler = make_model("euler-friction");
        CHECK_THROWS_AS(nonlinear_relaxation_coefficient(
                            *euler, Vec::Constant(1, 1.0), Vec::Constant(1, 1.0)),
                        ConfigError);
    }
}
