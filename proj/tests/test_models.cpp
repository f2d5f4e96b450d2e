#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fvlab/errors.hpp"
#include "fvlab/numerics.hpp"
#include "fvlab/relaxation_model.hpp"
#include "fvlab/structural_conditions.hpp"

using namespace fvlab;

namespace {
Vec state2(double a, double b) {
    Vec u(2);
    u << a, b;
    return u;
}
Vec state3(double a, double b, double c) {
    Vec u(3);
    u << a, b, c;
    return u;
}
}  // namespace

TEST_CASE("euler-friction flux and relaxation closed forms") {
    const auto model = make_model("euler-friction");  // p(rho) = rho^2
    const Vec F = model->flux(state2(1.0, 0.5));
    CHECK(F[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(F[1] == doctest::Approx(1.25).epsilon(1e-14));

    const Vec R = model->relaxation(state2(1.0, 0.5));
    CHECK(R[0] == 0.0);
    CHECK(R[1] == doctest::Approx(0.5).epsilon(1e-14));

    const Vec Eu = model->equilibrium_lift(Vec::Constant(1, 2.0));
    CHECK(Eu[0] == 2.0);
    CHECK(Eu[1] == 0.0);
    CHECK(inf_norm(model->relaxation(Eu)) == 0.0);
}

TEST_CASE("m1 flux, equilibria, and the u = tau + tau^4 inversion") {
    const auto model = make_model("m1");
    const Vec F = model->flux(state3(1.0, 0.0, 1.0));
    CHECK(F[0] == 0.0);
    CHECK(F[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(F[2] == 0.0);

    // tau = 1 gives u = 2.
    const Vec Eu = model->equilibrium_lift(Vec::Constant(1, 2.0));
    CHECK(Eu[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(Eu[1] == 0.0);
    CHECK(Eu[2] == doctest::Approx(1.0).epsilon(1e-13));

    // Round trip over a tau sweep.
    for (double tau = 0.1; tau < 2.0; tau += 0.173) {
        const double u = tau + std::pow(tau, 4);
        const Vec E = model->equilibrium_lift(Vec::Constant(1, u));
        CHECK(E[2] == doctest::Approx(tau).epsilon(1e-12));
    }
}

TEST_CASE("coupled euler-m1 equilibria") {
    const auto model = make_model("euler-m1");
    Vec u(2);
    u << 1.0, 1.0;
    const Vec Eu = model->equilibrium_lift(u);
    CHECK(Eu[0] == 1.0);
    CHECK(Eu[1] == 0.0);
    CHECK(Eu[2] == 1.0);
    CHECK(Eu[3] == 0.0);
    CHECK(inf_norm(model->relaxation(Eu)) == 0.0);
    CHECK(inf_norm(Vec(model->conserved_projector() * model->flux(Eu))) == 0.0);
}

TEST_CASE("shallow water flux and nonlinear friction") {
    const auto model = make_model("shallow-water-friction");  // g = 1, kappa0 = 1
    const Vec F = model->flux(state2(2.0, 0.0));
    CHECK(F[0] == 0.0);
    CHECK(F[1] == doctest::Approx(2.0).epsilon(1e-14));  // g h^2 / 2

    // kappa(h) = 1/h: R = (0, (1/h^2) g q |q|).
    const Vec R = model->relaxation(state2(1.0, 2.0));
    CHECK(R[0] == 0.0);
    CHECK(R[1] == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("eddington factor endpoints") {
    CHECK(eddington_factor(0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(eddington_factor(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(eddington_factor(-1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(eddington_factor(1.5), InvariantError);

    // Derivative against finite differences on the open interval.
    for (double xi = -0.9; xi < 0.95; xi += 0.15) {
        const double fd = fd_directional(
            [xi](double s) { return eddington_factor(xi + s); }, 1e-5);
        CHECK(eddington_factor_derivative(xi) == doctest::Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("inadmissible states are rejected with the violated constraint") {
    const auto euler = make_model("euler-friction");
    CHECK_THROWS_WITH_AS(euler->flux(state2(-1.0, 0.0)),
                         doctest::Contains("rho <= 0"), InvariantError);
    const auto m1 = make_model("m1");
    CHECK_THROWS_WITH_AS(m1->flux(state3(1.0, 1.5, 1.0)),
                         doctest::Contains("|f/e| >= 1"), InvariantError);
    CHECK_THROWS_AS(m1->equilibrium_lift(Vec::Constant(1, -0.5)), InvariantError);
}

TEST_CASE("all four models pass the structural conditions") {
    for (const auto& name : model_names()) {
        const auto model = make_model(name);
        const ConditionReport report =
            verify_structural_conditions(*model, 100, 42);
        INFO(report.to_string());
        CHECK(report.all_pass());
    }
}

TEST_CASE("a corrupted model is flagged on condition 3") {
    // Decorator that breaks Q F(E(u)) = 0 by biasing the first flux entry.
    struct Corrupted final : RelaxationModel {
        std::unique_ptr<RelaxationModel> base = make_model("euler-friction");
        const std::string& name() const override {
            static const std::string n = "euler-friction-corrupted";
            return n;
        }
        int state_dim() const override { return base->state_dim(); }
        int equilibrium_dim() const override { return base->equilibrium_dim(); }
        const Mat& conserved_projector() const override {
            return base->conserved_projector();
        }
        Vec flux(const Vec& U) const override {
            Vec f = base->flux(U);
            f[0] += 1e-3;
            return f;
        }
        Vec relaxation(const Vec& U) const override { return base->relaxation(U); }
        Vec equilibrium_lift(const Vec& u) const override {
            return base->equilibrium_lift(u);
        }
        Mat flux_jacobian(const Vec& U) const override {
            return base->flux_jacobian(U);
        }
        Mat relaxation_jacobian(const Vec& U) const override {
            return base->relaxation_jacobian(U);
        }
        Mat lift_jacobian(const Vec& u) const override {
            return base->lift_jacobian(u);
        }
        bool admissible(const Vec& U) const override { return base->admissible(U); }
        std::string admissibility_violation(const Vec& U) const override {
            return base->admissibility_violation(U);
        }
        bool equilibrium_admissible(const Vec& u) const override {
            return base->equilibrium_admissible(u);
        }
        double max_wave_speed(const Vec& U) const override {
            return base->max_wave_speed(U);
        }
        Mat closed_form_diffusion(const Vec& u) const override {
            return base->closed_form_diffusion(u);
        }
        Vec sample_state(std::mt19937_64& rng) const override {
            return base->sample_state(rng);
        }
        Vec sample_equilibrium(std::mt19937_64& rng) const override {
            return base->sample_equilibrium(rng);
        }
    } corrupted;

    const ConditionReport report = verify_structural_conditions(corrupted, 50, 1);
    const ConditionEntry* c3 = report.find("condition3_QF_equilibrium_zero");
    REQUIRE(c3 != nullptr);
    CHECK_FALSE(c3->pass);
    CHECK(c3->max_residual == doctest::Approx(1e-3).epsilon(1e-10));
}

TEST_CASE("nonlinear scaling identity") {
    const auto sw = make_model("shallow-water-friction");
    Vec V(2);
    V << 1.0, 1.0;

    SUBCASE("shallow water, q = 2, M(eps) = diag(eps, 1)") {
        CHECK(nonlinear_scaling_check(*sw, 0.5, V, Vec::Constant(1, 1.0)) <=
              1e-12);
        CHECK(nonlinear_scaling_check(*sw, 0.125, V, Vec::Constant(1, 1.0)) <=
              1e-12);
    }
    SUBCASE("q = 1 model with linear relaxation") {
        const auto euler = make_model("euler-friction");
        Vec W(2);
        W << 0.25, 0.7;
        CHECK(nonlinear_scaling_check(*euler, 0.37, W, Vec::Constant(1, 1.2)) <=
              1e-12);
    }
    SUBCASE("eps = 1 is exact for every model") {
        for (const auto& name : model_names()) {
            const auto model = make_model(name);
            std::mt19937_64 rng(3);
            const Vec u = model->sample_equilibrium(rng);
            Vec W = Vec::Constant(model->state_dim(), 0.05);
            CHECK(nonlinear_scaling_check(*model, 1.0, W, u) <= 1e-12);
        }
    }
}

TEST_CASE("property: closed-form equalities on 1000 seeded samples") {
    for (const auto& name : model_names()) {
        const auto model = make_model(name);
        const Mat& Q = model->conserved_projector();
        std::mt19937_64 rng(2024);
        double r1 = 0, r2 = 0, r3 = 0;
        for (int i = 0; i < 1000; ++i) {
            const Vec U = model->sample_state(rng);
            r1 = std::max(r1, inf_norm(Vec(Q * model->relaxation(U))));
            const Vec u = model->sample_equilibrium(rng);
            const Vec Eu = model->equilibrium_lift(u);
            r2 = std::max(r2, inf_norm(model->relaxation(Eu)));
            r3 = std::max(r3, inf_norm(Vec(Q * model->flux(Eu))));
        }
        INFO(name);
        CHECK(r1 <= 1e-12);
        CHECK(r2 <= 1e-12);
        CHECK(r3 <= 1e-12);
    }
}

TEST_CASE("property: analytic jacobians match 4th-order differences") {
    for (const auto& name : model_names()) {
        const auto model = make_model(name);
        std::mt19937_64 rng(7);
        double worst = 0;
        for (int i = 0; i < 100; ++i) {
            const Vec U = model->sample_state(rng);
            auto f = [&](const Vec& x) { return model->flux(x); };
            auto r = [&](const Vec& x) { return model->relaxation(x); };
            const Mat A = model->flux_jacobian(U);
            const Mat B = model->relaxation_jacobian(U);
            const Mat Afd = fd_jacobian(f, U, 1e-5);
            const Mat Bfd = fd_jacobian(r, U, 1e-5);
            worst = std::max(worst, inf_norm(Mat(A - Afd)) /
                                        std::max(1.0, inf_norm(Afd)));
            worst = std::max(worst, inf_norm(Mat(B - Bfd)) /
                                        std::max(1.0, inf_norm(Bfd)));
        }
        INFO(name);
        CHECK(worst <= 1e-6);
    }
}

TEST_CASE("property: entropy dissipation identities") {
    // Euler friction: D_U Phi . R = rho v^2 exactly.
    const auto euler = make_model("euler-friction");
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const Vec U = euler->sample_state(rng);
        const double rho = U[0], v = U[1] / U[0];
        const double diss =
            euler->entropy()->entropy_gradient(U).dot(euler->relaxation(U));
        CHECK(diss == doctest::Approx(rho * v * v).epsilon(1e-13));
        CHECK(diss >= 0.0);
    }
    // Shallow water: D_U Phi . R >= 0.
    const auto sw = make_model("shallow-water-friction");
    for (int i = 0; i < 200; ++i) {
        const Vec U = sw->sample_state(rng);
        CHECK(sw->entropy()->entropy_gradient(U).dot(sw->relaxation(U)) >=
              -1e-14);
    }
}

TEST_CASE("property: batch evaluation agrees with per-state evaluation") {
    for (const auto& name : model_names()) {
        const auto model = make_model(name);
        std::mt19937_64 rng(11);
        Mat states(model->state_dim(), 32);
        for (int i = 0; i < 32; ++i) states.col(i) = model->sample_state(rng);
        Mat fb(model->state_dim(), 32), rb(model->state_dim(), 32);
        model->flux_batch(states, fb);
        model->relaxation_batch(states, rb);
        for (int i = 0; i < 32; ++i) {
            CHECK(inf_norm(Vec(fb.col(i) - model->flux(states.col(i)))) == 0.0);
            CHECK(inf_norm(Vec(rb.col(i) - model->relaxation(states.col(i)))) ==
                  0.0);
        }
        double s = 0;
        for (int i = 0; i < 32; ++i)
            s = std::max(s, model->max_wave_speed(states.col(i)));
        CHECK(model->max_wave_speed_batch(states) ==
              doctest::Approx(s).epsilon(1e-15));
    }
}

TEST_CASE("model registry rejects unknown names and parameters") {
    CHECK_THROWS_AS(make_model("euler"), ConfigError);
    CHECK_THROWS_AS(make_model("euler-friction", {{"nope", 1.0}}), ConfigError);
    CHECK_NOTHROW(make_model("euler-friction", {{"kappa", 2.0}, {"gamma", 1.4}}));
}
