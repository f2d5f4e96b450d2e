#pragma once

#include "fvlab/grid1d.hpp"

namespace fvlab {

// Single intermediate state of the two-wave approximate Riemann solver with
// frame speeds -b, +b:
//   Ustar = (UL + UR)/2 - (F(UR) - F(UL)) / (2b).
Vec intermediate_state(const RelaxationModel& model, const Vec& UL,
                       const Vec& UR, double b);

// Two-point numerical flux consistent with F:
//   (F(UL) + F(UR))/2 - (b/2)(UR - UL).
Vec hll_flux(const RelaxationModel& model, const Vec& UL, const Vec& UR,
             double b);

// Time step from the non-interaction condition b dt / dx <= 1/2.
double cfl_timestep(double b, double dx, double safety);

// Wave-speed rule used by the drivers: 1.1 x the largest spectral radius of
// the flux Jacobian over the cells.
double suggest_wave_speed(const RelaxationModel& model, const Mat& states);

// One forward-Euler conservative update of d_t U + d_x F(U) = 0 with HLL
// fluxes and periodic wrap. Requires b dt / dx <= 1/2; throws
// NumericalError otherwise and InvariantError (with the cell index) if a
// post-step state leaves the admissible set.
DiscreteField step_homogeneous(const RelaxationModel& model,
                               const DiscreteField& field, double b,
                               double dt);

}  // namespace fvlab
