#pragma once

#include <array>
#include <functional>
#include <vector>

#include "fvlab/spacetime_mesh.hpp"

namespace fvlab::spacetime {

// ============================================================================
// Face-level operations
// ============================================================================

// |e| = int_e i* d_u omega(0) over the spacelike face [th_a, th_b] at time t.
// Positive under global hyperbolicity; throws InvariantError otherwise.
double face_measure(const FluxField1Form& omega, double t, double th_a,
                    double th_b);

// Averaged flux phi_e(u) = (int_e i* omega(u)) / |e| and its u-derivative.
double averaged_flux(const FluxField1Form& omega, double t, double th_a,
                     double th_b, double u);
double averaged_flux_derivative(const FluxField1Form& omega, double t,
                                double th_a, double th_b, double u);

// Vertical face: node track affine in t from (t0, th0) to (t1, th1).
struct VerticalTrack {
    double t0, t1, th0, th1;
};

// Unoriented integral of i* omega(u) along the track with t increasing:
// the pullback is (omega0(u; t, th(t)) th'(t) + omega1(u; t, th(t))) dt.
double track_integral(const FluxField1Form& omega, const VerticalTrack& tr,
                      double u);
double track_integral_derivative(const FluxField1Form& omega,
                                 const VerticalTrack& tr, double u);

// Lax-Friedrichs total face flux with the face oriented as part of the
// element boundary (orientation +1 for the element's left face, -1 for its
// right face):
//   q(u, v) = (or I(u) + or I(v)) / 2 + (D/2)(u - v).
// Consistency q(u,u) = or I(u) holds for any D; monotonicity needs
// D >= sup |I'(u)| over the data range.
double lax_friedrichs_face_flux(const FluxField1Form& omega,
                                const VerticalTrack& tr, int orientation,
                                double D, double u, double v);

// ============================================================================
// Slab solver
// ============================================================================

struct SpacetimeOptions {
    double u_lo = -1.0;  // data range: solver brackets, D bounds, CFL checks
    double u_hi = 1.0;
    std::vector<double> kruzkov_params;  // c values for the entropy residuals
    double cd_tolerance = 1e-12;         // convex-decomposition assertion
};

struct SlabResult {
    std::vector<double> values;                        // u_K^+ per element
    std::vector<std::array<double, 2>> intermediates;  // utilde (left, right)
    double max_cd_residual = 0.0;
    double max_dei_residual = -1e300;
    double dissipation = 0.0;  // sum (|e+|/N_K) |utilde - u+|^2 over faces
};

class SpacetimeSolver {
public:
    SpacetimeSolver(const FluxField1Form& omega,
                    const SpacetimeTriangulation& tri, SpacetimeOptions opts);

    // Initial projection: solve phi_e(u_K) = (1/|e|) int_e i* omega(u0) on
    // every face of the initial slice (a scalar monotone equation).
    std::vector<double> discretize_initial_data(
        const std::function<double(double)>& u0) const;

    // One slab update with the scheme
    //   |e+| phi+(u+) = |e-| phi-(u-) - sum_faces q(u-, u_neighbor-),
    // intermediate values, convex-decomposition check, and (when Kruzkov
    // parameters are configured) the discrete entropy inequalities.
    SlabResult advance_slab(int s, const std::vector<double>& lower) const;

    // Kruzkov contraction integral I_s = sum_e int_e i* Omega(u_e, v_e) at
    // slice s for two element-value sets.
    double contraction_integral(int s, const std::vector<double>& u,
                                const std::vector<double>& v) const;

    // Quadratic-entropy content sum_e |e| phi^Omega_e(u_e) of slice s, with
    // Omega the entropy flux of U(u) = u^2 / 2.
    double quadratic_entropy(int s, const std::vector<double>& values) const;

    // Modulus of convexity of phi^Omega o (phi^omega)^{-1} over the data
    // range: beta = min over upper faces of 1 / max_u phi'_e(u).
    double beta_modulus() const;

    double measure(int s, int j) const;  // cached |e| of face (s, j)
    const SpacetimeTriangulation& triangulation() const { return *tri_; }
    const SpacetimeOptions& options() const { return opts_; }

private:
    double phi(int s, int j, double u) const;
    double dphi(int s, int j, double u) const;
    double phi_kruzkov(int s, int j, double u, double c) const;
    VerticalTrack track(int s, int j) const;
    double face_D(int s, int j) const;  // 1.1 x sampled Lipschitz bound
    double invert_phi(int s, int j, double target, int element) const;
    void check_cfl(int s) const;
    std::vector<double> u_samples() const;

    const FluxField1Form* omega_;
    const SpacetimeTriangulation* tri_;
    SpacetimeOptions opts_;
    std::vector<std::vector<double>> measures_;  // [slice][face]
    std::vector<std::vector<double>> trackD_;    // [slab][track]
    mutable std::vector<char> cfl_checked_;
};

// ============================================================================
// Whole-run driver and diagnostics
// ============================================================================

struct SpacetimeRun {
    std::vector<std::vector<double>> slices;  // [S+1][J] element values
    std::vector<std::vector<std::array<double, 2>>> intermediates;  // [S][J]
    double dissipation_total = 0.0;
    double max_cd_residual = 0.0;
    double max_dei_residual = -1e300;
    double beta = 0.0;
    double initial_quadratic_entropy = 0.0;

    // Constant of the global dissipation bound
    //   dissipation_total <= (2/beta) int_{H0} i* Omega(u0).
    double dissipation_bound() const {
        return 2.0 / beta * initial_quadratic_entropy;
    }
};

SpacetimeRun run_spacetime(const FluxField1Form& omega,
                           const SpacetimeTriangulation& tri,
                           const std::function<double(double)>& u0,
                           const SpacetimeOptions& opts);

// Contraction integrals per slice for two runs on the same triangulation.
std::vector<double> kruzkov_contraction(const FluxField1Form& omega,
                                        const SpacetimeTriangulation& tri,
                                        const SpacetimeRun& u,
                                        const SpacetimeRun& v,
                                        const SpacetimeOptions& opts);

// ============================================================================
// Slice functions (piecewise constant on the circle) — used to compare
// solutions across different meshes and under diffeomorphisms.
// ============================================================================

struct SliceFunction {
    std::vector<double> breakpoints;  // ascending within one turn
    std::vector<double> values;       // value on [b_k, b_{k+1})
    double value_at(double theta) const;
};

SliceFunction to_slice_function(const SpacetimeTriangulation& tri, int s,
                                const std::vector<double>& values);

// Transports a slice function by the diffeomorphism at time t: breakpoints
// move by theta -> Theta(t, theta), values ride along.
SliceFunction push_forward(const SliceFunction& f, const SpacetimeDiffeo& phi,
                           double t);

// L1 distance weighted by the slice measure i* d_u omega(0):
//   int |a - b| d_u omega0(0; t, theta) dtheta.
double slice_l1_distance(const FluxField1Form& omega, double t,
                         const SliceFunction& a, const SliceFunction& b);

}  // namespace fvlab::spacetime
