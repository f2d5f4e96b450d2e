#include "fvlab/spacetime_scheme.hpp"

#include <algorithm>
#include <cmath>

#include "fvlab/errors.hpp"
#include "fvlab/numerics.hpp"

namespace fvlab::spacetime {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

// ============================================================================
// Face-level operations
// ============================================================================

double face_measure(const FluxField1Form& omega, double t, double th_a,
                    double th_b) {
    const double m = integrate(
        [&](double th) { return omega.domega0(0.0, t, th); }, th_a, th_b);
    if (!(m > 0.0))
        throw InvariantError("face_measure: non-positive measure, "
                             "hyperbolicity fails on this face");
    return m;
}

double averaged_flux(const FluxField1Form& omega, double t, double th_a,
                     double th_b, double u) {
    const double m = face_measure(omega, t, th_a, th_b);
    return integrate([&](double th) { return omega.omega0(u, t, th); }, th_a,
                     th_b) /
           m;
}

double averaged_flux_derivative(const FluxField1Form& omega, double t,
                                double th_a, double th_b, double u) {
    const double m = face_measure(omega, t, th_a, th_b);
    return integrate([&](double th) { return omega.domega0(u, t, th); }, th_a,
                     th_b) /
           m;
}

double track_integral(const FluxField1Form& omega, const VerticalTrack& tr,
                      double u) {
    const double slope = (tr.th1 - tr.th0) / (tr.t1 - tr.t0);
    return integrate(
        [&](double t) {
            const double th = tr.th0 + slope * (t - tr.t0);
            return omega.omega0(u, t, th) * slope + omega.omega1(u, t, th);
        },
        tr.t0, tr.t1);
}

double track_integral_derivative(const FluxField1Form& omega,
                                 const VerticalTrack& tr, double u) {
    const double slope = (tr.th1 - tr.th0) / (tr.t1 - tr.t0);
    return integrate(
        [&](double t) {
            const double th = tr.th0 + slope * (t - tr.t0);
            return omega.domega0(u, t, th) * slope + omega.domega1(u, t, th);
        },
        tr.t0, tr.t1);
}

double lax_friedrichs_face_flux(const FluxField1Form& omega,
                                const VerticalTrack& tr, int orientation,
                                double D, double u, double v) {
    const double iu = orientation * track_integral(omega, tr, u);
    const double iv = orientation * track_integral(omega, tr, v);
    return 0.5 * (iu + iv) + 0.5 * D * (u - v);
}

// ============================================================================
// Solver
// ============================================================================

SpacetimeSolver::SpacetimeSolver(const FluxField1Form& omega,
                                 const SpacetimeTriangulation& tri,
                                 SpacetimeOptions opts)
    : omega_(&omega), tri_(&tri), opts_(std::move(opts)) {
    tri.validate();
    if (!(opts_.u_hi > opts_.u_lo))
        throw ConfigError("spacetime solver: empty data range");

    const int J = tri.elements;
    measures_.resize(tri.slabs() + 1);
    for (int s = 0; s <= tri.slabs(); ++s) {
        measures_[s].resize(J);
        for (int j = 0; j < J; ++j)
            measures_[s][j] = face_measure(omega, tri.slice_times[s],
                                           tri.angle(s, j), tri.angle(s, j + 1));
    }

    // Per-track numerical diffusion D = 1.1 x sampled Lipschitz bound.
    trackD_.resize(tri.slabs());
    const auto samples = u_samples();
    for (int s = 0; s < tri.slabs(); ++s) {
        trackD_[s].resize(J);
        for (int j = 0; j < J; ++j) {
            double bound = 0.0;
            for (double u : samples)
                bound = std::max(bound,
                                 std::abs(track_integral_derivative(
                                     *omega_, track(s, j), u)));
            trackD_[s][j] = 1.1 * bound;
        }
    }
    cfl_checked_.assign(tri.slabs(), 0);
}

std::vector<double> SpacetimeSolver::u_samples() const {
    const double pad = 0.1 * (opts_.u_hi - opts_.u_lo);
    std::vector<double> s(21);
    for (int k = 0; k < 21; ++k)
        s[k] = (opts_.u_lo - pad) + (opts_.u_hi - opts_.u_lo + 2 * pad) * k / 20.0;
    return s;
}

VerticalTrack SpacetimeSolver::track(int s, int j) const {
    // Track of node j (wraps): left face of element j within slab s.
    const int J = tri_->elements;
    const int base = ((j % J) + J) % J;
    const int wrap = (j - base) / J;
    return {tri_->slice_times[s], tri_->slice_times[s + 1],
            tri_->node_angles[s][base] + wrap * kTwoPi,
            tri_->node_angles[s + 1][base] + wrap * kTwoPi};
}

double SpacetimeSolver::measure(int s, int j) const {
    const int J = tri_->elements;
    return measures_[s][((j % J) + J) % J];
}

double SpacetimeSolver::face_D(int s, int j) const {
    const int J = tri_->elements;
    return trackD_[s][((j % J) + J) % J];
}

double SpacetimeSolver::phi(int s, int j, double u) const {
    return integrate(
               [&](double th) { return omega_->omega0(u, tri_->slice_times[s], th); },
               tri_->angle(s, j), tri_->angle(s, j + 1)) /
           measure(s, j);
}

double SpacetimeSolver::dphi(int s, int j, double u) const {
    return integrate(
               [&](double th) { return omega_->domega0(u, tri_->slice_times[s], th); },
               tri_->angle(s, j), tri_->angle(s, j + 1)) /
           measure(s, j);
}

double SpacetimeSolver::phi_kruzkov(int s, int j, double u, double c) const {
    return phi(s, j, std::max(u, c)) - phi(s, j, std::min(u, c));
}

void SpacetimeSolver::check_cfl(int s) const {
    if (cfl_checked_[s]) return;
    const int J = tri_->elements;
    const auto samples = u_samples();
    for (int j = 0; j < J; ++j) {
        double dphi_min = std::numeric_limits<double>::infinity();
        for (double u : samples) dphi_min = std::min(dphi_min, dphi(s + 1, j, u));
        // Enforced with the inflated D so the per-face update maps stay
        // monotone, which is what the entropy inequalities rely on.
        const double lhs = 2.0 / measure(s + 1, j) *
                           std::max(face_D(s, j), face_D(s, j + 1));
        if (!(lhs < dphi_min))
            throw NumericalError(
                "spacetime: CFL condition violated at slab " + std::to_string(s) +
                ", element " + std::to_string(j));
    }
    cfl_checked_[s] = 1;
}

std::vector<double> SpacetimeSolver::discretize_initial_data(
    const std::function<double(double)>& u0) const {
    const int J = tri_->elements;
    std::vector<double> out(J);
    for (int j = 0; j < J; ++j) {
        const double a = tri_->angle(0, j), b = tri_->angle(0, j + 1);
        const double target =
            integrate([&](double th) { return omega_->omega0(u0(th), 0.0, th); },
                      a, b) /
            measure(0, j);
        const double pad = 0.1 * (opts_.u_hi - opts_.u_lo);
        const double lo = opts_.u_lo - pad, hi = opts_.u_hi + pad;
        try {
            out[j] = solve_monotone(
                [&](double u) { return phi(0, j, u) - target; },
                [&](double u) { return dphi(0, j, u); }, lo, hi, 1e-8, 1e-13,
                std::max(1.0, std::abs(target)));
        } catch (const NumericalError&) {
            throw InvariantError(
                "discretize_initial_data: face " + std::to_string(j) +
                " not bracketed by the data range widened 10%");
        }
    }
    return out;
}

double SpacetimeSolver::invert_phi(int s, int j, double target,
                                   int element) const {
    const double pad = 0.1 * (opts_.u_hi - opts_.u_lo);
    try {
        return solve_monotone([&](double u) { return phi(s, j, u) - target; },
                              [&](double u) { return dphi(s, j, u); },
                              opts_.u_lo - pad, opts_.u_hi + pad, 1e-8, 1e-13,
                              std::max(1.0, std::abs(target)));
    } catch (const NumericalError&) {
        throw NumericalError("spacetime: inversion bracket failed at element " +
                             std::to_string(element) + " of slice " +
                             std::to_string(s));
    }
}

SlabResult SpacetimeSolver::advance_slab(int s,
                                         const std::vector<double>& lower) const {
    const int J = tri_->elements;
    if (static_cast<int>(lower.size()) != J)
        throw ConfigError("advance_slab: value count mismatch");
    check_cfl(s);

    // Oriented track integrals at the two neighbor values. For track j
    // (between elements j-1 and j): own[j] = I_j(u_j), left[j] = I_j(u_{j-1}).
    std::vector<double> i_own(J), i_left(J);
    for (int j = 0; j < J; ++j) {
        const VerticalTrack tr = track(s, j);
        i_own[j] = track_integral(*omega_, tr, lower[j]);
        i_left[j] = track_integral(*omega_, tr, lower[(j + J - 1) % J]);
    }

    SlabResult res;
    res.values.resize(J);
    res.intermediates.resize(J);

    std::vector<double> phi_plus_up(J);  // phi+ of u+ as solved (for CD check)
    for (int j = 0; j < J; ++j) {
        const int jn = (j + 1) % J;
        const double Dl = face_D(s, j), Dr = face_D(s, j + 1);
        // q at the element's left face (orientation +1) and right face (-1).
        const double q_left =
            0.5 * (i_own[j] + i_left[j]) + 0.5 * Dl * (lower[j] - lower[(j + J - 1) % J]);
        const double q_right =
            -0.5 * (i_own[jn] + i_left[jn]) + 0.5 * Dr * (lower[j] - lower[jn]);
        const double q_left_diag = i_own[j];      // q(u, u) on the left face
        const double q_right_diag = -i_left[jn];  // q(u, u) on the right face

        const double me_minus = measure(s, j);
        const double me_plus = measure(s + 1, j);
        const double balance =
            me_minus * phi(s, j, lower[j]) - q_left - q_right;
        res.values[j] = invert_phi(s + 1, j, balance / me_plus, j);
        phi_plus_up[j] = phi(s + 1, j, res.values[j]);

        // Intermediate values (one per vertical face).
        const double phi_low = phi(s + 1, j, lower[j]);
        const double tl = phi_low - 2.0 / me_plus * (q_left - q_left_diag);
        const double tr = phi_low - 2.0 / me_plus * (q_right - q_right_diag);
        res.intermediates[j][0] = invert_phi(s + 1, j, tl, j);
        res.intermediates[j][1] = invert_phi(s + 1, j, tr, j);

        const double cd =
            std::abs(phi_plus_up[j] - 0.5 * (tl + tr));
        res.max_cd_residual = std::max(res.max_cd_residual, cd);
        if (cd > opts_.cd_tolerance * std::max(1.0, std::abs(phi_plus_up[j])))
            throw InvariantError("spacetime: convex decomposition residual " +
                                 std::to_string(cd) + " at element " +
                                 std::to_string(j));

        const double dl = res.intermediates[j][0] - res.values[j];
        const double dr = res.intermediates[j][1] - res.values[j];
        res.dissipation += 0.5 * me_plus * (dl * dl + dr * dr);
    }

    // Discrete entropy inequalities for the Kruzkov family.
    for (double c : opts_.kruzkov_params) {
        std::vector<double> iv_own(J), iv_left(J), iw_own(J), iw_left(J);
        for (int j = 0; j < J; ++j) {
            const VerticalTrack tr = track(s, j);
            const int jm = (j + J - 1) % J;
            iv_own[j] = track_integral(*omega_, tr, std::max(lower[j], c));
            iv_left[j] = track_integral(*omega_, tr, std::max(lower[jm], c));
            iw_own[j] = track_integral(*omega_, tr, std::min(lower[j], c));
            iw_left[j] = track_integral(*omega_, tr, std::min(lower[jm], c));
        }
        for (int j = 0; j < J; ++j) {
            const int jm = (j + J - 1) % J;
            const int jn = (j + 1) % J;
            const double Dl = face_D(s, j), Dr = face_D(s, j + 1);
            const double me_plus = measure(s + 1, j);

            const double qk_left =
                0.5 * (iv_own[j] + iv_left[j]) +
                0.5 * Dl * (std::max(lower[j], c) - std::max(lower[jm], c)) -
                (0.5 * (iw_own[j] + iw_left[j]) +
                 0.5 * Dl * (std::min(lower[j], c) - std::min(lower[jm], c)));
            const double qk_left_diag = iv_own[j] - iw_own[j];

            const double qk_right =
                -0.5 * (iv_own[jn] + iv_left[jn]) +
                0.5 * Dr * (std::max(lower[j], c) - std::max(lower[jn], c)) -
                (-0.5 * (iw_own[jn] + iw_left[jn]) +
                 0.5 * Dr * (std::min(lower[j], c) - std::min(lower[jn], c)));
            const double qk_right_diag = -(iv_left[jn] - iw_left[jn]);

            const double base = phi_kruzkov(s + 1, j, lower[j], c);
            const double rl = phi_kruzkov(s + 1, j, res.intermediates[j][0], c) -
                              base + 2.0 / me_plus * (qk_left - qk_left_diag);
            const double rr = phi_kruzkov(s + 1, j, res.intermediates[j][1], c) -
                              base + 2.0 / me_plus * (qk_right - qk_right_diag);
            res.max_dei_residual =
                std::max(res.max_dei_residual, std::max(rl, rr));
        }
    }
    return res;
}

double SpacetimeSolver::contraction_integral(int s, const std::vector<double>& u,
                                             const std::vector<double>& v) const {
    const int J = tri_->elements;
    if (static_cast<int>(u.size()) != J || static_cast<int>(v.size()) != J)
        throw ConfigError("contraction_integral: value count mismatch");
    double total = 0.0;
    for (int j = 0; j < J; ++j)
        total += measure(s, j) * std::abs(phi(s, j, u[j]) - phi(s, j, v[j]));
    return total;
}

double SpacetimeSolver::quadratic_entropy(int s,
                                          const std::vector<double>& values) const {
    const int J = tri_->elements;
    const double t = tri_->slice_times[s];
    double total = 0.0;
    for (int j = 0; j < J; ++j) {
        // int_e i* Omega(u) with Omega0(u) = int_0^u v domega0(v) dv.
        total += integrate(
            [&](double th) {
                const double u = values[j];
                return integrate(
                    [&](double v) { return v * omega_->domega0(v, t, th); }, 0.0,
                    u);
            },
            tri_->angle(s, j), tri_->angle(s, j + 1));
    }
    return total;
}

double SpacetimeSolver::beta_modulus() const {
    // (phi^Omega o phi^{-1})'' = 1 / phi'(u) for the quadratic entropy, so the
    // modulus of convexity over the data range is 1 / max phi'.
    double beta = std::numeric_limits<double>::infinity();
    const auto samples = u_samples();
    for (int s = 1; s <= tri_->slabs(); ++s)
        for (int j = 0; j < tri_->elements; ++j) {
            double dmax = 0.0;
            for (double u : samples) dmax = std::max(dmax, dphi(s, j, u));
            beta = std::min(beta, 1.0 / dmax);
        }
    return beta;
}

// ============================================================================
// Driver
// ============================================================================

SpacetimeRun run_spacetime(const FluxField1Form& omega,
                           const SpacetimeTriangulation& tri,
                           const std::function<double(double)>& u0,
                           const SpacetimeOptions& opts) {
    SpacetimeSolver solver(omega, tri, opts);
    SpacetimeRun run;
    run.slices.reserve(tri.slabs() + 1);
    run.slices.push_back(solver.discretize_initial_data(u0));
    run.initial_quadratic_entropy = solver.quadratic_entropy(0, run.slices[0]);
    run.beta = solver.beta_modulus();

    for (int s = 0; s < tri.slabs(); ++s) {
        SlabResult r = solver.advance_slab(s, run.slices.back());
        run.dissipation_total += r.dissipation;
        run.max_cd_residual = std::max(run.max_cd_residual, r.max_cd_residual);
        run.max_dei_residual = std::max(run.max_dei_residual, r.max_dei_residual);
        run.intermediates.push_back(std::move(r.intermediates));
        run.slices.push_back(std::move(r.values));
    }
    return run;
}

std::vector<double> kruzkov_contraction(const FluxField1Form& omega,
                                        const SpacetimeTriangulation& tri,
                                        const SpacetimeRun& u,
                                        const SpacetimeRun& v,
                                        const SpacetimeOptions& opts) {
    if (u.slices.size() != v.slices.size() ||
        u.slices.at(0).size() != v.slices.at(0).size())
        throw ConfigError("kruzkov_contraction: solutions live on different "
                          "triangulations");
    SpacetimeSolver solver(omega, tri, opts);
    std::vector<double> out(u.slices.size());
    for (int s = 0; s < static_cast<int>(u.slices.size()); ++s)
        out[s] = solver.contraction_integral(s, u.slices[s], v.slices[s]);
    return out;
}

// ============================================================================
// Slice functions
// ============================================================================

double SliceFunction::value_at(double theta) const {
    const int J = static_cast<int>(breakpoints.size());
    const double b0 = breakpoints[0];
    double th = std::fmod(theta - b0, kTwoPi);
    if (th < 0) th += kTwoPi;
    th += b0;
    // Find k with breakpoints[k] <= th < breakpoints[k+1].
    const auto it =
        std::upper_bound(breakpoints.begin(), breakpoints.end(), th);
    const int k = static_cast<int>(it - breakpoints.begin()) - 1;
    return values[std::clamp(k, 0, J - 1)];
}

SliceFunction to_slice_function(const SpacetimeTriangulation& tri, int s,
                                const std::vector<double>& values) {
    SliceFunction f;
    f.breakpoints = tri.node_angles[s];
    f.values = values;
    return f;
}

SliceFunction push_forward(const SliceFunction& f, const SpacetimeDiffeo& phi,
                           double t) {
    SliceFunction out;
    out.values = f.values;
    out.breakpoints.resize(f.breakpoints.size());
    for (size_t k = 0; k < f.breakpoints.size(); ++k)
        out.breakpoints[k] = phi.forward(t, f.breakpoints[k]).second;
    // Normalize into one ascending turn starting at the smallest image.
    const int J = static_cast<int>(out.breakpoints.size());
    int shift = 0;
    for (int k = 1; k < J; ++k)
        if (out.breakpoints[k] < out.breakpoints[shift]) shift = k;
    std::rotate(out.breakpoints.begin(), out.breakpoints.begin() + shift,
                out.breakpoints.end());
    std::rotate(out.values.begin(), out.values.begin() + shift, out.values.end());
    for (int k = 1; k < J; ++k)
        while (out.breakpoints[k] < out.breakpoints[k - 1])
            out.breakpoints[k] += kTwoPi;
    return out;
}

double slice_l1_distance(const FluxField1Form& omega, double t,
                         const SliceFunction& a, const SliceFunction& b) {
    // Merge both breakpoint sets into one circular partition.
    std::vector<double> cuts;
    auto push_mod = [&cuts](double th) {
        double x = std::fmod(th, kTwoPi);
        if (x < 0) x += kTwoPi;
        cuts.push_back(x);
    };
    for (double th : a.breakpoints) push_mod(th);
    for (double th : b.breakpoints) push_mod(th);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(cuts.front() + kTwoPi);

    double total = 0.0;
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k], hi = cuts[k + 1];
        if (hi - lo < 1e-15) continue;
        const double mid = 0.5 * (lo + hi);
        const double diff = std::abs(a.value_at(mid) - b.value_at(mid));
        if (diff == 0.0) continue;
        total += diff * integrate(
                            [&](double th) { return omega.domega0(0.0, t, th); },
                            lo, hi);
    }
    return total;
}

}  // namespace fvlab::spacetime
