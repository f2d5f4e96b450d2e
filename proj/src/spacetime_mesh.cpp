#include "fvlab/spacetime_mesh.hpp"

#include <cmath>
#include <random>

#include "fvlab/errors.hpp"
#include "fvlab/numerics.hpp"

namespace fvlab::spacetime {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double SpacetimeTriangulation::angle(int s, int j) const {
    const int J = elements;
    const int wrap = (j >= 0) ? j / J : -((-j - 1) / J + 1);
    const int base = j - wrap * J;
    return node_angles[s][base] + wrap * kTwoPi;
}

double SpacetimeTriangulation::face_width(int s, int j) const {
    return angle(s, j + 1) - angle(s, j);
}

double SpacetimeTriangulation::face_midpoint(int s, int j) const {
    return 0.5 * (angle(s, j) + angle(s, j + 1));
}

double SpacetimeTriangulation::tau_max() const {
    double m = 0.0;
    for (int s = 0; s < slabs(); ++s)
        m = std::max(m, slice_times[s + 1] - slice_times[s]);
    return m;
}

double SpacetimeTriangulation::tau_min() const {
    double m = std::numeric_limits<double>::infinity();
    for (int s = 0; s < slabs(); ++s)
        m = std::min(m, slice_times[s + 1] - slice_times[s]);
    return m;
}

double SpacetimeTriangulation::h_max() const {
    double m = 0.0;
    for (int s = 0; s <= slabs(); ++s)
        for (int j = 0; j < elements; ++j) m = std::max(m, face_width(s, j));
    return m;
}

double SpacetimeTriangulation::as2_ratio_a() const {
    const double h = h_max(), tm = tau_max();
    return (tm * tm + h * h) / tau_min();
}

double SpacetimeTriangulation::as2_ratio_b() const {
    const double tm = tau_max();
    return tm * tm / h_max();
}

void SpacetimeTriangulation::validate() const {
    if (elements < 4) throw InvariantError("triangulation: need >= 4 elements");
    if (slabs() < 1) throw InvariantError("triangulation: need >= 1 slab");
    for (int s = 0; s < static_cast<int>(slice_times.size()); ++s) {
        if (s > 0 && !(slice_times[s] > slice_times[s - 1]))
            throw InvariantError("triangulation: slice times not increasing");
        const auto& th = node_angles[s];
        if (static_cast<int>(th.size()) != elements)
            throw InvariantError("triangulation: ragged node array");
        double total = 0.0;
        for (int j = 0; j < elements; ++j) {
            const double w = face_width(s, j);
            if (!(w > 0.0))
                throw InvariantError("triangulation: non-positive face width");
            total += w;
        }
        if (std::abs(total - kTwoPi) > 1e-10)
            throw InvariantError("triangulation: slice does not tile the circle");
    }
}

SpacetimeTriangulation build_slab_mesh(const FluxField1Form& omega,
                                       const MeshOptions& opts) {
    if (opts.elements < 4) throw ConfigError("mesh: need >= 4 elements");
    if (!(opts.final_time > 0.0)) throw ConfigError("mesh: final_time must be > 0");
    if (!(opts.cfl > 0.0 && opts.cfl <= 1.0))
        throw ConfigError("mesh: cfl must lie in (0, 1]");
    if (!(opts.theta_jitter >= 0.0 && opts.theta_jitter < 0.4))
        throw ConfigError("mesh: theta_jitter must lie in [0, 0.4)");
    if (!(opts.time_jitter >= 0.0 && opts.time_jitter < 0.5))
        throw ConfigError("mesh: time_jitter must lie in [0, 0.5)");
    if (!(opts.u_hi > opts.u_lo)) throw ConfigError("mesh: empty data range");

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    const int J = opts.elements;
    const double spacing = kTwoPi / J;

    auto make_slice = [&]() {
        std::vector<double> th(J);
        for (int j = 0; j < J; ++j)
            th[j] = spacing * (j + opts.theta_jitter * unif(rng));
        return th;
    };

    // u samples over the data range (widened 10%) for the Lipschitz bounds.
    const double pad = 0.1 * (opts.u_hi - opts.u_lo);
    std::vector<double> usamp(21);
    for (int k = 0; k < 21; ++k)
        usamp[k] = (opts.u_lo - pad) + (opts.u_hi - opts.u_lo + 2 * pad) * k / 20.0;

    SpacetimeTriangulation tri;
    tri.elements = J;
    tri.slice_times.push_back(0.0);
    tri.node_angles.push_back(make_slice());

    while (tri.slice_times.back() < opts.final_time * (1.0 - 1e-14)) {
        const double t0 = tri.slice_times.back();
        const auto& lower = tri.node_angles.back();
        std::vector<double> upper = make_slice();

        // Slab height from the element-wise CFL budget
        //   (N_K / |e+|) * D < inf d_u phi_{e+},  N_K = 2,
        // where D = 1.1 sup_u |int_{e0} i* d_u omega| and the vertical
        // integral splits into a node-displacement part (tau-independent)
        // and a tau * |d_u omega1| part.
        double tau = std::numeric_limits<double>::infinity();
        for (int j = 0; j < J; ++j) {
            const int jn = (j + 1) % J;
            const double a0 = upper[j];
            double a1 = upper[jn];
            if (jn == 0) a1 += kTwoPi;
            const double width = a1 - a0;
            const double mid = 0.5 * (a0 + a1);

            double dphi_min = std::numeric_limits<double>::infinity();
            for (double u : usamp) {
                const double d = integrate(
                    [&](double th) { return omega.domega0(u, t0, th); }, a0, a1);
                dphi_min = std::min(dphi_min, d);
            }
            const double measure = integrate(
                [&](double th) { return omega.domega0(0.0, t0, th); }, a0, a1);
            if (!(measure > 0.0))
                throw InvariantError("mesh: non-positive face measure (hyperbolicity)");
            dphi_min /= measure;

            // Node displacement between the slices, and coefficient bounds
            // near the element.
            double disp = 0.0, c0 = 0.0, c1 = 0.0;
            for (int node : {j, jn}) {
                double d = upper[node] - lower[node];
                disp = std::max(disp, std::abs(d));
            }
            for (double u : usamp) {
                for (int k = -2; k <= 2; ++k) {
                    const double th = mid + 0.5 * width * k / 2.0;
                    c0 = std::max(c0, std::abs(omega.domega0(u, t0, th)));
                    c1 = std::max(c1, std::abs(omega.domega1(u, t0, th)));
                }
            }
            const double budget =
                opts.cfl * dphi_min * measure / (2.0 * 1.1) - c0 * disp;
            if (!(budget > 0.0))
                throw ConfigError(
                    "mesh: node jitter exhausts the CFL budget; reduce "
                    "theta_jitter or refine");
            tau = std::min(tau, (c1 > 0.0) ? budget / c1
                                           : opts.final_time);
        }

        if (opts.time_jitter > 0.0)
            tau *= 1.0 - opts.time_jitter * (unif(rng) + 0.5);
        const double remaining = opts.final_time - t0;
        if (tau > remaining) tau = remaining;

        tri.slice_times.push_back(t0 + tau);
        tri.node_angles.push_back(std::move(upper));
    }
    tri.validate();
    return tri;
}

}  // namespace fvlab::spacetime
