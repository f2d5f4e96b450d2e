#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>

namespace fvlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ============================================================================
// Gauss-Legendre quadrature
// ============================================================================

// 5-point rule on [-1,1]; exact for polynomials up to degree 9.
struct GaussLegendre5 {
    static constexpr int n = 5;
    static const std::array<double, 5>& nodes();
    static const std::array<double, 5>& weights();
};

// Integrate f over [a,b] with the 5-point rule.
double integrate(const std::function<double(double)>& f, double a, double b);

// ============================================================================
// Finite differences
// ============================================================================

// 4th-order central difference Jacobian of f: R^m -> R^k at x.
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x,
                double h = 1e-4);

// 4th-order central difference gradient of a scalar map.
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                double h = 1e-4);

// 2nd-order central difference Hessian of a scalar map.
Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x,
               double h = 1e-4);

// Directional derivative d/dt f(x + t*d) at t=0, 4th order.
double fd_directional(const std::function<double(double)>& f, double h = 1e-6);

// ============================================================================
// Scalar root finding
// ============================================================================

// Solves f(x) = 0 for a strictly monotone f on [lo, hi]: bisection down to
// an interval of width `bisect_width`, then Newton with derivative df,
// polished to |f| <= tol * scale. Falls back to bisection whenever a Newton
// iterate leaves the bracket. Throws NumericalError if [lo,hi] does not
// bracket a sign change.
double solve_monotone(const std::function<double(double)>& f,
                      const std::function<double(double)>& df, double lo,
                      double hi, double bisect_width = 1e-8,
                      double tol = 1e-13, double scale = 1.0);

// Newton iteration with bisection safeguard for f increasing on (0, inf);
// used for scalar inversions with a known positive root.
double solve_increasing_positive(const std::function<double(double)>& f,
                                 const std::function<double(double)>& df,
                                 double guess, double rel_tol = 1e-14);

// ============================================================================
// Misc small helpers
// ============================================================================

inline double inf_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
inline double inf_norm(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace fvlab
