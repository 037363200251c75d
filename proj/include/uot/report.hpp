#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace uot {

enum class Termination {
    Converged,       // stopping rule met
    MaxIterations,   // iteration cap reached, best iterate returned
    TrivialInput,    // identical endpoints, nothing to do
};

std::string to_string(Termination t);

/// Per-iteration diagnostics. Entries that do not apply to a solver are NaN.
struct IterationRecord {
    std::size_t iteration = 0;
    double objective = 0.0;   // UW2 energy or UW1 primal value
    double residual = 0.0;    // UW2 HJ residual or UW1 constraint residual
    double gap = 0.0;         // UW1 relative primal-dual gap
    double dual_bound = 0.0;  // UW1 certified lower bound
};

struct SolveReport {
    std::size_t iterations = 0;
    std::size_t cg_iterations = 0;
    std::vector<IterationRecord> history;
    double wall_seconds = 0.0;
    Termination termination = Termination::MaxIterations;
};

/// Step size too large: the UW2 energy or the PDHG iterates blew up.
class StepSizeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace uot
