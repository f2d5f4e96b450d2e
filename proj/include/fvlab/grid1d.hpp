#pragma once

#include "fvlab/relaxation_model.hpp"

namespace fvlab {

// Uniform periodic 1D mesh. cells * dx must reproduce the domain length to
// round-off; at least 4 cells.
struct UniformGrid1D {
    int cells = 0;
    double dx = 0.0;
    double length = 0.0;

    static UniformGrid1D make(int cells, double length);
    double cell_center(int i) const { return (i + 0.5) * dx; }
};

// Piecewise-constant states on a periodic grid: column i of `states` is the
// state vector of cell i.
struct DiscreteField {
    UniformGrid1D grid;
    Mat states;  // N x cells
    double time = 0.0;

    int cells() const { return grid.cells; }
    Eigen::Index dim() const { return states.rows(); }
};

// Builds a field by sampling cell centers: state(x) callable -> Vec.
DiscreteField make_field(const UniformGrid1D& grid, int state_dim,
                         const std::function<Vec(double)>& state);

// Projects onto the conserved variables: column i becomes Q U_i.
Mat conserved_field(const RelaxationModel& model, const DiscreteField& field);

// Checks every cell against the model's admissible set; throws
// InvariantError naming the first offending cell.
void require_admissible_field(const RelaxationModel& model, const Mat& states);

// dx * sum_i |a_i - b_i| per component (periodic L1 distance).
Vec l1_distance(const Mat& a, const Mat& b, double dx);

}  // namespace fvlab
