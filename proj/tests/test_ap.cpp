#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fvlab/ap_scheme.hpp"
#include "fvlab/errors.hpp"
#include "fvlab/hll_scheme.hpp"

using namespace fvlab;

namespace {
Vec scalar(double x) { return Vec::Constant(1, x); }

DiscreteField equilibrium_sine(const RelaxationModel& model, int cells,
                               double base, double amp) {
    const UniformGrid1D grid = UniformGrid1D::make(cells, 1.0);
    return make_field(grid, model.state_dim(), [&](double x) {
        return model.equilibrium_lift(
            scalar(base + amp * std::cos(2 * M_PI * x)));
    });
}
}  // namespace

TEST_CASE("alpha matrix closed forms") {
    SUBCASE("gamma = 0 gives the identity") {
        const Mat a = alpha_matrix(0.0, 0.1, 1.0, Mat::Zero(2, 2));
        CHECK(inf_norm(Mat(a - Mat::Identity(2, 2))) == 0.0);
    }
    SUBCASE("scalar case") {
        // gamma dx / 2b = 0.1: alpha = I / 1.1.
        const Mat a = alpha_matrix(1.0, 0.2, 1.0, Mat::Zero(2, 2));
        CHECK(a(0, 0) == doctest::Approx(1.0 / 1.1).epsilon(1e-14));
        CHECK(a(1, 1) == doctest::Approx(1.0 / 1.1).epsilon(1e-14));
        CHECK(std::abs(a(0, 1)) <= 1e-15);
    }
    SUBCASE("diagonal sigma") {
        // gamma dx / 2b = 1 with sigma = diag(3, 0): alpha = diag(1/5, 1/2).
        Mat sigma = Mat::Zero(2, 2);
        sigma(0, 0) = 3.0;
        const Mat a = alpha_matrix(1.0, 4.0, 2.0, sigma);
        CHECK(a(0, 0) == doctest::Approx(0.2).epsilon(1e-14));
        CHECK(a(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("sigma from the target diffusion satisfies the commutation "
          "condition") {
    SUBCASE("euler-friction, hand values") {
        const auto model = make_model("euler-friction");  // p' = 2 rho
        const auto [sigma, mhat] =
            sigma_from_target_diffusion(*model, scalar(1.0), scalar(1.0), 2.0);
        CHECK(mhat(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
        // sigma = diag(b^2 / M - 1, 0) = diag(1, 0).
        CHECK(sigma(0, 0) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(std::abs(sigma(0, 1)) <= 1e-14);
        CHECK(std::abs(sigma(1, 0)) <= 1e-14);
        CHECK(std::abs(sigma(1, 1)) <= 1e-14);

        const Mat& Q = model->conserved_projector();
        const Mat lhs = Q * (Mat::Identity(2, 2) + sigma).inverse();
        const Mat rhs = mhat * Q / 4.0;
        CHECK(inf_norm(Mat(lhs - rhs)) <= 1e-12);
    }
    SUBCASE("identity tuning when M = b^2 I") {
        // Choose rho with p'(rho) = b^2.
        const auto model = make_model("euler-friction");
        const double b = 1.5;
        const double rho = b * b / 2.0;
        const auto [sigma, mhat] =
            sigma_from_target_diffusion(*model, scalar(rho), scalar(rho), b);
        CHECK(inf_norm(sigma) <= 1e-12);
        (void)mhat;
    }
    SUBCASE("coupled euler-m1 block construction") {
        const auto model = make_model("euler-m1", {{"C_p", 1.0}, {"eta", 2.0}});
        Vec u(2);
        u << 1.0, 1.0;
        const double b = 2.0;
        const auto [sigma, mhat] = sigma_from_target_diffusion(*model, u, u, b);
        CHECK(mhat(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(mhat(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(mhat(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        const Mat& Q = model->conserved_projector();
        const Mat lhs = Q * (Mat::Identity(4, 4) + sigma).inverse();
        const Mat rhs = mhat * Q / (b * b);
        CHECK(inf_norm(Mat(lhs - rhs)) <= 1e-12);
    }
    SUBCASE("m1 (non-selection Q) still satisfies the commutation") {
        const auto model = make_model("m1");
        const auto [sigma, mhat] =
            sigma_from_target_diffusion(*model, scalar(2.0), scalar(2.2), 1.1);
        const Mat& Q = model->conserved_projector();
        const Mat lhs = Q * (Mat::Identity(3, 3) + sigma).inverse();
        const Mat rhs = mhat * Q / (1.1 * 1.1);
        CHECK(inf_norm(Mat(lhs - rhs)) <= 1e-12);
    }
}

TEST_CASE("sigma smoothness on smooth equilibrium data") {
    // Neighboring interface matrices differ by O(dx): the largest jump must
    // halve when the grid is refined.
    const auto model = make_model("euler-friction");
    auto worst_jump = [&](int cells) {
        const double dx = 1.0 / cells;
        auto u_at = [&](int i) {
            return scalar(1.0 + 0.4 * std::cos(2 * M_PI * (i + 0.5) * dx));
        };
        double worst = 0.0;
        for (int i = 0; i + 2 < cells; ++i) {
            const Mat s0 =
                sigma_from_target_diffusion(*model, u_at(i), u_at(i + 1), 2.5)
                    .sigma;
            const Mat s1 =
                sigma_from_target_diffusion(*model, u_at(i + 1), u_at(i + 2), 2.5)
                    .sigma;
            worst = std::max(worst, inf_norm(Mat(s1 - s0)));
        }
        return worst;
    };
    const double j64 = worst_jump(64);
    const double j128 = worst_jump(128);
    const double j256 = worst_jump(256);
    CHECK(j64 / j128 == doctest::Approx(2.0).epsilon(0.1));
    CHECK(j128 / j256 == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("source rewriting identity (b/dx)(I - alpha) Rbar = (gamma/2) alpha R") {
    const auto model = make_model("euler-friction");
    const double b = 2.0, dx = 0.05, gamma = 25.0;
    const auto [sigma, mhat] =
        sigma_from_target_diffusion(*model, scalar(1.1), scalar(0.9), b);
    (void)mhat;
    const Mat alpha = alpha_matrix(gamma, dx, b, sigma);
    const Mat I = Mat::Identity(2, 2);
    Vec U(2);
    U << 1.05, 0.31;
    const Vec R = model->relaxation(U);
    const Vec lhs = (b / dx) * (I - alpha) * (I + sigma).inverse() * R;
    const Vec rhs = 0.5 * gamma * alpha * R;
    CHECK(inf_norm(Vec(lhs - rhs)) <= 1e-13 * std::max(1.0, inf_norm(rhs)));
}

TEST_CASE("modified interface states") {
    const auto model = make_model("euler-friction");
    Vec UL(2), UR(2);
    UL << 1.0, 0.2;
    UR << 1.0, -0.2;

    SUBCASE("gamma = 0 reduces both to the intermediate state") {
        const Mat sigma = Mat::Zero(2, 2);
        const Mat alpha = alpha_matrix(0.0, 0.1, 2.0, sigma);
        const auto [sl, sr] =
            modified_interface_states(*model, UL, UR, 2.0, alpha, sigma);
        const Vec ustar = intermediate_state(*model, UL, UR, 2.0);
        CHECK(inf_norm(Vec(sl - ustar)) <= 1e-14);
        CHECK(inf_norm(Vec(sr - ustar)) <= 1e-14);
    }
    SUBCASE("equilibrium inputs are fixed points") {
        const Vec Eu = model->equilibrium_lift(scalar(1.3));
        const auto [sigma, mhat] =
            sigma_from_target_diffusion(*model, scalar(1.3), scalar(1.3), 2.0);
        (void)mhat;
        const Mat alpha = alpha_matrix(10.0, 0.1, 2.0, sigma);
        const auto [sl, sr] =
            modified_interface_states(*model, Eu, Eu, 2.0, alpha, sigma);
        CHECK(inf_norm(Vec(sl - Eu)) <= 1e-14);
        CHECK(inf_norm(Vec(sr - Eu)) <= 1e-14);
    }
    SUBCASE("independent re-implementation of the displayed formulas") {
        const double b = 2.0, dx = 0.1, eps = 0.1;
        Mat sigma = Mat::Zero(2, 2);
        sigma(0, 0) = 1.0;
        const Mat alpha = alpha_matrix(1.0 / eps, dx, b, sigma);
        const auto [sl, sr] =
            modified_interface_states(*model, UL, UR, b, alpha, sigma);

        // By hand: everything is diagonal for this sigma.
        const double a_diag0 = 1.0 / (1.0 + dx / (2 * eps * b) * 2.0);
        const double a_diag1 = 1.0 / (1.0 + dx / (2 * eps * b) * 1.0);
        const Vec ustar = 0.5 * (UL + UR) -
                          (model->flux(UR) - model->flux(UL)) / (2.0 * b);
        const Vec rbar_l = Vec((model->relaxation(UL).array() /
                                Eigen::Array2d(2.0, 1.0)).matrix());
        Vec expect_l(2);
        expect_l[0] = a_diag0 * ustar[0] + (1 - a_diag0) * (UL[0] - rbar_l[0]);
        expect_l[1] = a_diag1 * ustar[1] + (1 - a_diag1) * (UL[1] - rbar_l[1]);
        CHECK(inf_norm(Vec(sl - expect_l)) <= 1e-13);
        (void)sr;
    }
}

TEST_CASE("discrete asymptotic step: three-point formula by hand") {
    const auto model = make_model("euler-friction");
    SUBCASE("constant field is unchanged") {
        const Mat u = Mat::Constant(1, 5, 1.2);
        const Mat next = discrete_asymptotic_step(*model, u, 1e-4, 0.1);
        CHECK(inf_norm(Mat(next - u)) <= 1e-15);
    }
    SUBCASE("unit-diffusion hand evaluation") {
        // Force M = 1 by clamping: a synthetic model is overkill, use the
        // identity-like regime p' ~ 1 at rho = 0.5 (p = rho^2, p' = 2 rho = 1).
        // With u = (1, 0, 0) scaled around 0.5 the interface means vary, so
        // instead check against a directly computed reference.
        Mat u(1, 3);
        u << 1.0, 0.0, 0.0;
        // Bypass admissibility concerns: use dt/dx^2 = 0.25 with M clamped at
        // the floor for the zero cells. Expected from the formula with
        // M_{i+1/2} = p'(mean) = (u_i + u_{i+1}):
        const double dt = 0.25, dx = 1.0;
        const Mat next = discrete_asymptotic_step(*model, u, dt, dx);
        auto m = [](double a, double b) { return a + b; };  // p' (mean) = a+b
        Vec expect(3);
        expect[0] = 1.0 + 0.25 * (m(1, 0) * (0 - 1) + m(0, 1) * (0 - 1));
        expect[1] = 0.0 + 0.25 * (m(0, 0) * 0 + m(1, 0) * (1 - 0));
        expect[2] = 0.0 + 0.25 * (m(0, 1) * (1 - 0) + m(0, 0) * 0);
        // The zero-interface coefficient is clamped at the 1e-8 floor; its
        // contribution vanishes because the difference is zero there.
        CHECK(next(0, 0) == doctest::Approx(expect[0]).epsilon(1e-13));
        CHECK(next(0, 1) == doctest::Approx(expect[1]).epsilon(1e-13));
        CHECK(next(0, 2) == doctest::Approx(expect[2]).epsilon(1e-13));
    }
    SUBCASE("stability bound enforced") {
        Mat u = Mat::Constant(1, 8, 1.0);
        CHECK_THROWS_AS(discrete_asymptotic_step(*model, u, 1.0, 0.1),
                        NumericalError);
    }
}

TEST_CASE("ap step: spatially constant equilibrium data is a fixed point") {
    for (const std::string name :
         {"euler-friction", "m1", "euler-m1", "shallow-water-friction"}) {
        const auto model = make_model(name);
        std::mt19937_64 rng(4);
        const Vec u0 = model->sample_equilibrium(rng);
        const UniformGrid1D grid = UniformGrid1D::make(16, 1.0);
        const DiscreteField field = make_field(
            grid, model->state_dim(),
            [&](double) { return model->equilibrium_lift(u0); });
        APConfig cfg;
        cfg.eps = 0.01;
        cfg.b = 2.0;
        cfg.sigma_rule = model->relaxation_exponent() == 1
                             ? SigmaRule::TargetDiffusion
                             : SigmaRule::Zero;
        const double dt = cfg.eps * cfl_timestep(cfg.b, grid.dx, 0.9);
        const DiscreteField next = ap_step(*model, field, cfg, dt);
        INFO(name);
        CHECK(inf_norm(Mat(next.states - field.states)) <= 1e-14);
    }
}

TEST_CASE("ap step conserves Q U with spatially constant sigma") {
    const auto model = make_model("euler-friction");
    const UniformGrid1D grid = UniformGrid1D::make(64, 1.0);
    // Non-equilibrium smooth data; conservation must hold regardless.
    DiscreteField field = make_field(grid, 2, [](double x) {
        Vec U(2);
        U << 1.0 + 0.4 * std::cos(2 * M_PI * x), 0.15 * std::sin(2 * M_PI * x);
        return U;
    });
    APConfig cfg;
    cfg.eps = 0.05;
    cfg.b = suggest_wave_speed(*model, field.states);
    cfg.sigma_rule = SigmaRule::Zero;  // constant sigma
    const double conserved0 = field.states.row(0).sum();
    for (int s = 0; s < 2000; ++s) {
        const double dt = cfg.eps * cfl_timestep(cfg.b, grid.dx, 0.9);
        field = ap_step(*model, field, cfg, dt);
    }
    CHECK(std::abs(field.states.row(0).sum() - conserved0) /
              std::abs(conserved0) <=
          1e-12);
}

TEST_CASE("gamma disabled reproduces the homogeneous step") {
    const auto model = make_model("euler-friction");
    const UniformGrid1D grid = UniformGrid1D::make(48, 1.0);
    const DiscreteField field = make_field(grid, 2, [](double x) {
        Vec U(2);
        U << 1.0 + 0.3 * std::cos(2 * M_PI * x), 0.1 * std::sin(4 * M_PI * x);
        return U;
    });
    APConfig cfg;
    cfg.eps = 1.0;
    cfg.b = suggest_wave_speed(*model, field.states);
    cfg.relaxation_enabled = false;
    const double dt = cfl_timestep(cfg.b, grid.dx, 0.8);
    const DiscreteField ap = ap_step(*model, field, cfg, dt);
    const DiscreteField hom = step_homogeneous(*model, field, cfg.b, dt);
    CHECK(inf_norm(Mat(ap.states - hom.states)) <= 1e-15);
}

TEST_CASE("discrete AP limit: one ap step approaches the asymptotic step at "
          "rate O(eps)") {
    const auto model = make_model("euler-friction");
    const int cells = 100;
    DiscreteField field = equilibrium_sine(*model, cells, 1.0, 0.4);
    const double dx = field.grid.dx;
    const double b = suggest_wave_speed(*model, field.states);
    const Mat u0 = conserved_field(*model, field);

    auto deviation = [&](double eps) {
        APConfig cfg;
        cfg.eps = eps;
        cfg.b = b;
        // One common late-time step, CFL-admissible for the smallest eps.
        const double dt = 1e-7 * cfl_timestep(b, dx, 0.9);
        const DiscreteField next = ap_step(*model, field, cfg, dt);
        const Mat limit = discrete_asymptotic_step(*model, u0, dt, dx);
        return inf_norm(Mat(conserved_field(*model, next) - limit));
    };
    const double d6 = deviation(1e-6);
    const double d7 = deviation(1e-7);
    const double ratio = d6 / d7;
    INFO("deviations ", d6, " ", d7, " ratio ", ratio);
    CHECK(ratio >= 5.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("ap invariant domain check") {
    const auto model = make_model("euler-friction");
    SUBCASE("equilibrium field reports nothing") {
        const DiscreteField field = equilibrium_sine(*model, 32, 1.0, 0.3);
        APConfig cfg;
        cfg.eps = 0.5;
        cfg.b = suggest_wave_speed(*model, field.states);
        CHECK(ap_invariant_domain_check(*model, field, cfg).empty());
    }
    SUBCASE("a deliberately tiny b is flagged") {
        const UniformGrid1D grid = UniformGrid1D::make(16, 1.0);
        const DiscreteField field = make_field(grid, 2, [](double x) {
            Vec U(2);
            U << (x < 0.5 ? 2.0 : 0.11), (x < 0.5 ? 1.8 : -0.1);
            return U;
        });
        APConfig cfg;
        cfg.eps = 1.0;
        cfg.b = 0.05;
        const auto report = ap_invariant_domain_check(*model, field, cfg);
        CHECK_FALSE(report.empty());
    }
}

TEST_CASE("entropy diagnostic on a relaxing single mode") {
    const auto model = make_model("euler-friction");
    const UniformGrid1D grid = UniformGrid1D::make(8, 1.0);
    // Pure relaxation of a uniform momentum perturbation: entropy strictly
    // decreases (friction dissipates kinetic energy).
    DiscreteField field = make_field(grid, 2, [](double) {
        Vec U(2);
        U << 1.0, 0.5;
        return U;
    });
    APConfig cfg;
    cfg.eps = 0.3;
    cfg.b = suggest_wave_speed(*model, field.states);
    cfg.sigma_rule = SigmaRule::Zero;
    std::vector<DiscreteField> trajectory = {field};
    for (int s = 0; s < 50; ++s) {
        const double dt = cfg.eps * cfl_timestep(cfg.b, grid.dx, 0.9);
        trajectory.push_back(ap_step(*model, trajectory.back(), cfg, dt));
    }
    const std::vector<double> totals =
        entropy_monotonicity_diagnostic(*model, trajectory);
    for (size_t k = 1; k < totals.size(); ++k) CHECK(totals[k] < totals[k - 1]);
}

TEST_CASE("ap step rejects a late-time step beyond the fan CFL") {
    const auto model = make_model("euler-friction");
    const DiscreteField field = equilibrium_sine(*model, 32, 1.0, 0.2);
    APConfig cfg;
    cfg.eps = 1e-3;
    cfg.b = suggest_wave_speed(*model, field.states);
    // dt / eps far beyond dx / 2b.
    CHECK_THROWS_AS(ap_step(*model, field, cfg, 10.0 * cfg.eps), NumericalError);
}
