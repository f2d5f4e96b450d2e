#pragma once

#include <stdexcept>
#include <string>

namespace fvlab {

// Error taxonomy shared by the library and the CLI. The CLI maps each class
// to a distinct process exit code (see tools/).
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: unknown keys, out-of-range parameters, unsupported
// model/operation combinations, singular tuning matrices.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Failure of the numerical machinery: CFL violations, root brackets lost,
// singular linear systems, NaN/overflow while stepping.
struct NumericalError : Error {
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// Violation of a structural invariant: inadmissible states, broken
// preconditions of the constrained solver, entropy residuals above
// tolerance when enforcement is enabled.
struct InvariantError : Error {
    explicit InvariantError(const std::string& msg) : Error(msg) {}
};

}  // namespace fvlab
