#include "fvlab/grid1d.hpp"

#include <cmath>

#include "fvlab/errors.hpp"

namespace fvlab {

UniformGrid1D UniformGrid1D::make(int cells, double length) {
    if (cells < 4) throw ConfigError("grid: at least 4 cells required");
    if (!(length > 0.0)) throw ConfigError("grid: domain length must be > 0");
    UniformGrid1D g;
    g.cells = cells;
    g.length = length;
    g.dx = length / cells;
    if (std::abs(g.cells * g.dx - length) > 1e-12 * length)
        throw ConfigError("grid: cells * dx does not reproduce the length");
    return g;
}

DiscreteField make_field(const UniformGrid1D& grid, int state_dim,
                         const std::function<Vec(double)>& state) {
    DiscreteField f;
    f.grid = grid;
    f.states.resize(state_dim, grid.cells);
    for (int i = 0; i < grid.cells; ++i) f.states.col(i) = state(grid.cell_center(i));
    return f;
}

Mat conserved_field(const RelaxationModel& model, const DiscreteField& field) {
    return model.conserved_projector() * field.states;
}

void require_admissible_field(const RelaxationModel& model, const Mat& states) {
    for (Eigen::Index i = 0; i < states.cols(); ++i) {
        if (!model.admissible(states.col(i)))
            throw InvariantError(
                model.name() + ": inadmissible state in cell " + std::to_string(i) +
                " (" + model.admissibility_violation(states.col(i)) + ")");
    }
}

Vec l1_distance(const Mat& a, const Mat& b, double dx) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ConfigError("l1_distance: shape mismatch");
    return dx * (a - b).cwiseAbs().rowwise().sum();
}

}  // namespace fvlab
