#include "fvlab/hll_scheme.hpp"

#include "fvlab/errors.hpp"

namespace fvlab {

Vec intermediate_state(const RelaxationModel& model, const Vec& UL,
                       const Vec& UR, double b) {
    if (!(b > 0.0)) throw ConfigError("intermediate_state: b must be > 0");
    return 0.5 * (UL + UR) - (model.flux(UR) - model.flux(UL)) / (2.0 * b);
}

Vec hll_flux(const RelaxationModel& model, const Vec& UL, const Vec& UR,
             double b) {
    if (!(b > 0.0)) throw ConfigError("hll_flux: b must be > 0");
    return 0.5 * (model.flux(UL) + model.flux(UR)) - 0.5 * b * (UR - UL);
}

double cfl_timestep(double b, double dx, double safety) {
    if (!(b > 0.0) || !(dx > 0.0) || !(safety > 0.0 && safety <= 1.0))
        throw ConfigError("cfl_timestep: need b > 0, dx > 0, safety in (0, 1]");
    return safety * dx / (2.0 * b);
}

double suggest_wave_speed(const RelaxationModel& model, const Mat& states) {
    return 1.1 * model.max_wave_speed_batch(states);
}

DiscreteField step_homogeneous(const RelaxationModel& model,
                               const DiscreteField& field, double b,
                               double dt) {
    const int cells = field.cells();
    const double dx = field.grid.dx;
    if (!(b > 0.0) || !(dt > 0.0))
        throw ConfigError("step_homogeneous: need b > 0 and dt > 0");
    if (b * dt / dx > 0.5 * (1.0 + 1e-12))
        throw NumericalError("step_homogeneous: CFL violated, b dt / dx = " +
                             std::to_string(b * dt / dx) + " > 1/2");

    const Eigen::Index N = field.dim();
    Mat flux(N, cells);
    model.flux_batch(field.states, flux);

    // F^HLL at interface i+1/2 between cells i and i+1 (periodic).
    Mat fhat(N, cells);
    for (int i = 0; i < cells; ++i) {
        const int j = (i + 1) % cells;
        fhat.col(i) = 0.5 * (flux.col(i) + flux.col(j)) -
                      0.5 * b * (field.states.col(j) - field.states.col(i));
    }

    DiscreteField next;
    next.grid = field.grid;
    next.time = field.time + dt;
    next.states.resize(N, cells);
    const double lambda = dt / dx;
    for (int i = 0; i < cells; ++i) {
        const int im = (i + cells - 1) % cells;
        next.states.col(i) =
            field.states.col(i) - lambda * (fhat.col(i) - fhat.col(im));
    }
    require_admissible_field(model, next.states);
    return next;
}

}  // namespace fvlab
