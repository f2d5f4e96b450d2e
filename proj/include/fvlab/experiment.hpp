#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fvlab/config_file.hpp"
#include "fvlab/grid1d.hpp"

namespace fvlab {

// Artifacts produced by one experiment (CSV files plus the JSON sidecar).
struct ExperimentOutcome {
    std::vector<std::string> artifacts;
};

// Dispatches one subcommand with the merged configuration, writing into
// out_dir. Deterministic given (config, seed). Errors propagate as
// ConfigError / NumericalError / InvariantError; the CLI maps them to exit
// codes 1 / 2 / 3.
ExperimentOutcome run_experiment(const std::string& subcommand,
                                 const ConfigFile& cfg,
                                 const std::string& out_dir,
                                 std::uint64_t seed);

std::vector<std::string> subcommand_names();

// Initial data described by the config section: init = sine | riemann in the
// equilibrium variable (lifted to a state), or init = random (seeded
// admissible states, not at equilibrium).
DiscreteField build_initial_field(const RelaxationModel& model,
                                  const UniformGrid1D& grid,
                                  const ConfigFile& cfg,
                                  const std::string& section,
                                  std::uint64_t seed);

std::unique_ptr<RelaxationModel> model_from_config(const ConfigFile& cfg,
                                                   const std::string& section);

// L1 convergence table against a fine-grid reference (both in the
// equilibrium variable): the reference is restricted to each coarse grid by
// cell averaging; observed order is log2(e_k / e_{k+1}).
struct ConvergenceTable {
    std::vector<double> dx;
    std::vector<Vec> errors;  // per level, per component
    std::vector<Vec> orders;  // per refinement step
};
ConvergenceTable convergence_table(const std::vector<Mat>& runs,
                                   const std::vector<double>& dxs,
                                   const Mat& reference, double dx_ref);

// Cell-average restriction of a fine periodic field onto a coarser grid
// whose resolution divides the fine one.
Mat restrict_field(const Mat& fine, int coarse_cells);

}  // namespace fvlab
