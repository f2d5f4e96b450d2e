#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fvlab/errors.hpp"
#include "fvlab/numerics.hpp"

using namespace fvlab;

TEST_CASE("gauss-legendre integrates degree-9 polynomials exactly") {
    auto f = [](double x) {
        return 1.0 + x - 2 * x * x + 0.5 * std::pow(x, 7) - std::pow(x, 9);
    };
    // Antiderivative evaluated on [0.2, 1.7].
    auto F = [](double x) {
        return x + x * x / 2 - 2 * x * x * x / 3 + 0.5 * std::pow(x, 8) / 8 -
               std::pow(x, 10) / 10;
    };
    const double got = integrate(f, 0.2, 1.7);
    CHECK(got == doctest::Approx(F(1.7) - F(0.2)).epsilon(1e-14));
}

TEST_CASE("gauss-legendre on a trig integrand") {
    // int_0^pi (1 + 0.5 sin th) dth = pi + 1.
    const double got =
        integrate([](double th) { return 1.0 + 0.5 * std::sin(th); }, 0.0,
                  3.14159265358979323846);
    CHECK(got == doctest::Approx(3.14159265358979323846 + 1.0).epsilon(1e-10));
}

TEST_CASE("fd jacobian matches an analytic one") {
    auto f = [](const Vec& x) {
        Vec y(2);
        y[0] = x[0] * x[0] * x[1];
        y[1] = std::sin(x[0]) + std::exp(x[1]);
        return y;
    };
    Vec x(2);
    x << 0.7, -0.3;
    const Mat J = fd_jacobian(f, x);
    CHECK(J(0, 0) == doctest::Approx(2 * x[0] * x[1]).epsilon(1e-8));
    CHECK(J(0, 1) == doctest::Approx(x[0] * x[0]).epsilon(1e-8));
    CHECK(J(1, 0) == doctest::Approx(std::cos(x[0])).epsilon(1e-8));
    CHECK(J(1, 1) == doctest::Approx(std::exp(x[1])).epsilon(1e-8));
}

TEST_CASE("fd hessian is symmetric and accurate") {
    auto f = [](const Vec& x) {
        return x[0] * x[0] * x[1] + std::cos(x[1]);
    };
    Vec x(2);
    x << 1.1, 0.4;
    const Mat H = fd_hessian(f, x);
    CHECK(H(0, 0) == doctest::Approx(2 * x[1]).epsilon(1e-5));
    CHECK(H(0, 1) == doctest::Approx(2 * x[0]).epsilon(1e-5));
    CHECK(H(1, 0) == H(0, 1));
    CHECK(H(1, 1) == doctest::Approx(-std::cos(x[1])).epsilon(1e-5));
}

TEST_CASE("monotone solve hits the root to high accuracy") {
    auto f = [](double x) { return x * x * x + x - 2.5; };
    auto df = [](double x) { return 3 * x * x + 1; };
    const double r = solve_monotone(f, df, 0.0, 2.0);
    CHECK(std::abs(f(r)) < 1e-12);
}

TEST_CASE("monotone solve reports an unbracketed root") {
    auto f = [](double x) { return x + 10.0; };
    auto df = [](double) { return 1.0; };
    CHECK_THROWS_AS(solve_monotone(f, df, 0.0, 1.0), NumericalError);
}

TEST_CASE("increasing-positive inversion solves u = tau + tau^4") {
    auto f = [](double t) { return t + t * t * t * t - 2.0; };
    auto df = [](double t) { return 1.0 + 4.0 * t * t * t; };
    const double tau = solve_increasing_positive(f, df, 1.3);
    CHECK(tau == doctest::Approx(1.0).epsilon(1e-13));
}
