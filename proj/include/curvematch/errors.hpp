#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace curvematch {

// Precondition / contract violations (wrong manifold, mismatched grids, ...).
struct ContractViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Geometric singularities (antipodal points on the sphere).
struct SingularityError : std::domain_error {
    using std::domain_error::domain_error;
};

// A curve whose discrete speed vanishes somewhere.
struct DegenerateCurveError : std::domain_error {
    using std::domain_error::domain_error;
};

// A linear solve that cannot be completed at working precision.
struct ConditioningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iteration that is moving away from its fixed point.
struct DivergenceError : std::runtime_error {
    std::vector<double> gap_history;
    explicit DivergenceError(const std::string& msg, std::vector<double> gaps = {})
        : std::runtime_error(msg), gap_history(std::move(gaps)) {}
};

// A boundary-value solve that ran out of iterations.
struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input files.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace curvematch
