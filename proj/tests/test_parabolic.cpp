#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fvlab/errors.hpp"
#include "fvlab/parabolic_reference.hpp"

using namespace fvlab;

namespace {
Mat sine_row(int cells, double base, double amp) {
    Mat u(1, cells);
    for (int i = 0; i < cells; ++i)
        u(0, i) = base + amp * std::cos(2 * M_PI * (i + 0.5) / cells);
    return u;
}
}  // namespace

TEST_CASE("regularized EN2 flux closed forms") {
    auto kappa = [](double h) { return 1.0 / h; };
    CHECK(regularized_en2_flux(1.0, 0.0, kappa, 1e-8) == 0.0);
    CHECK(regularized_en2_flux(1.0, 4.0, kappa, 1e-8) ==
          doctest::Approx(2.0).epsilon(1e-12));
    // Odd symmetry in the gradient.
    for (double s : {0.3, 1.7, 42.0})
        CHECK(regularized_en2_flux(2.0, -s, kappa, 1e-8) ==
              doctest::Approx(-regularized_en2_flux(2.0, s, kappa, 1e-8))
                  .epsilon(1e-14));
    CHECK_THROWS_AS(regularized_en2_flux(-1.0, 1.0, kappa, 1e-8),
                    InvariantError);
}

TEST_CASE("constant data is a fixed point of every effective problem") {
    for (const std::string name :
         {"euler-friction", "m1", "euler-m1", "shallow-water-friction"}) {
        const auto model = make_model(name);
        const ParabolicProblem problem = closed_form_effective(*model, 1e-6);
        std::mt19937_64 rng(1);
        const Vec u = model->sample_equilibrium(rng);
        Mat field(problem.dim, 16);
        for (int i = 0; i < 16; ++i) field.col(i) = u;
        const Mat out = solve_parabolic(problem, field, 0.01, 0.1);
        INFO(name);
        CHECK(inf_norm(Mat(out - field)) <= 1e-13);
    }
}

TEST_CASE("porous-medium behavior of the euler-friction limit") {
    // d_t rho = d_x^2(rho^2): compactly supported bump spreads, mass is
    // conserved, the maximum decreases.
    const auto model = make_model("euler-friction");
    const ParabolicProblem problem = closed_form_effective(*model);
    const int cells = 200;
    const double dx = 1.0 / cells;
    Mat u0(1, cells);
    int support0 = 0;
    for (int i = 0; i < cells; ++i) {
        const double x = (i + 0.5) * dx;
        u0(0, i) = std::max(0.0, 0.5 - 8.0 * (x - 0.5) * (x - 0.5));
        if (u0(0, i) > 1e-12) ++support0;
    }
    const double mass0 = u0.sum() * dx;
    const double max0 = u0.maxCoeff();

    const Mat u = solve_parabolic(problem, u0, 0.01, dx);
    int support1 = 0;
    for (int i = 0; i < cells; ++i)
        if (u(0, i) > 1e-12) ++support1;

    CHECK(u.sum() * dx == doctest::Approx(mass0).epsilon(1e-12));
    CHECK(u.maxCoeff() < max0);
    CHECK(support1 > support0);
    CHECK(u.minCoeff() >= 0.0);
}

TEST_CASE("linear heat mode decays at the exact fourier rate") {
    // d_t e = (1/3) d_x^2 e with e = 1 + 0.1 cos(2 pi x): after time T the
    // mode shrinks by exp(-(4 pi^2 / 3) T).
    const auto model = make_model("euler-m1");
    const ParabolicProblem problem = closed_form_effective(*model);
    const int cells = 400;
    const double dx = 1.0 / cells;
    const double T = 0.05;

    Mat u0(2, cells);
    for (int i = 0; i < cells; ++i) {
        u0(0, i) = 1.0;  // rho plays no role in the e equation
        u0(1, i) = 1.0 + 0.1 * std::cos(2 * M_PI * (i + 0.5) * dx);
    }
    const Mat u = solve_parabolic(problem, u0, T, dx);
    const double decay = std::exp(-4.0 * M_PI * M_PI / 3.0 * T);
    double worst = 0.0;
    for (int i = 0; i < cells; ++i) {
        const double exact =
            1.0 + 0.1 * decay * std::cos(2 * M_PI * (i + 0.5) * dx);
        worst = std::max(worst, std::abs(u(1, i) - exact));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("maximum principle for the scalar problems") {
    for (const std::string name : {"euler-friction", "m1"}) {
        const auto model = make_model(name);
        const ParabolicProblem problem = closed_form_effective(*model);
        Mat u = sine_row(64, 1.5, 0.5);
        const double dx = 1.0 / 64;
        double prev_max = u.maxCoeff();
        for (int k = 0; k < 5; ++k) {
            u = solve_parabolic(problem, u, 0.001, dx);
            const double now = u.maxCoeff();
            CHECK(now <= prev_max + 1e-12);
            prev_max = now;
        }
    }
}

TEST_CASE("grid convergence on the heat mode") {
    const auto model = make_model("euler-m1");
    const ParabolicProblem problem = closed_form_effective(*model);
    const double T = 0.02;
    auto error_at = [&](int cells) {
        const double dx = 1.0 / cells;
        Mat u0(2, cells);
        for (int i = 0; i < cells; ++i) {
            u0(0, i) = 1.0;
            u0(1, i) = 1.0 + 0.1 * std::cos(2 * M_PI * (i + 0.5) * dx);
        }
        const Mat u = solve_parabolic(problem, u0, T, dx);
        const double decay = std::exp(-4.0 * M_PI * M_PI / 3.0 * T);
        double err = 0.0;
        for (int i = 0; i < cells; ++i) {
            const double exact =
                1.0 + 0.1 * decay * std::cos(2 * M_PI * (i + 0.5) * dx);
            err += std::abs(u(1, i) - exact) * dx;
        }
        return err;
    };
    const double e1 = error_at(50);
    const double e2 = error_at(100);
    CHECK(e1 / e2 >= 1.8);
}

TEST_CASE("shallow-water nonlinear limit runs and conserves mass") {
    const auto model = make_model("shallow-water-friction");
    const ParabolicProblem problem = closed_form_effective(*model, 1e-6);
    const int cells = 50;
    const double dx = 1.0 / cells;
    const Mat u0 = sine_row(cells, 1.0, 0.3);
    const double mass0 = u0.sum() * dx;
    const Mat u = solve_parabolic(problem, u0, 1e-4, dx);
    CHECK(u.sum() * dx == doctest::Approx(mass0).epsilon(1e-12));
    // Diffusion flattens the profile.
    CHECK(u.maxCoeff() - u.minCoeff() < u0.maxCoeff() - u0.minCoeff());
}
