#pragma once

#include <cstdint>
#include <vector>

#include "fvlab/flux_form.hpp"

namespace fvlab::spacetime {

// Slab triangulation of [0,T] x S^1: trapezoidal elements between
// consecutive time slices, with node angle tracks affine in t within each
// slab. Element (s, j) has
//   spacelike faces  e^-  = [theta(s,j), theta(s,j+1)] at t_s,
//                    e^+  = [theta(s+1,j), theta(s+1,j+1)] at t_{s+1},
//   vertical faces   the node tracks j (left) and j+1 (right),
// so N_K = 2 and the left/right neighbors are elements j-1 and j+1 (mod J).
// Angles of each slice are strictly increasing and tile the circle exactly.
struct SpacetimeTriangulation {
    std::vector<double> slice_times;               // size S+1
    std::vector<std::vector<double>> node_angles;  // [S+1][J]
    int elements = 0;                              // J

    int slabs() const { return static_cast<int>(slice_times.size()) - 1; }

    // Angle of node j at slice s; j may wrap (adds full turns).
    double angle(int s, int j) const;
    double face_width(int s, int j) const;  // angle(s,j+1) - angle(s,j) > 0
    double face_midpoint(int s, int j) const;

    // Mesh-family bookkeeping for refinement studies.
    double tau_max() const;
    double tau_min() const;
    double h_max() const;  // largest spacelike face angular width
    double as2_ratio_a() const;  // (tau_max^2 + h^2) / tau_min
    double as2_ratio_b() const;  // tau_max^2 / h

    // Conformity checks (monotone angles, exact tiling of 2 pi); throws
    // InvariantError on failure.
    void validate() const;
};

struct MeshOptions {
    int elements = 32;
    double final_time = 0.5;
    double cfl = 0.9;           // fraction of the CFL bound used for slab heights
    double theta_jitter = 0.0;  // node jitter, fraction of the mean spacing (< 0.4)
    double time_jitter = 0.0;   // slab-height jitter, fraction in [0, 0.5)
    std::uint64_t seed = 0;
    double u_lo = -1.0;  // data range driving the CFL bound
    double u_hi = 1.0;
};

// Builds a triangulation slab by slab: node angles are jittered around the
// uniform grid, and each slab height is set to `cfl` times the largest
// height for which the face-Lipschitz CFL condition (with the 1.1-inflated
// numerical-flux bound D) holds for every element. The final slab is
// shortened to land exactly on final_time.
SpacetimeTriangulation build_slab_mesh(const FluxField1Form& omega,
                                       const MeshOptions& opts);

}  // namespace fvlab::spacetime
