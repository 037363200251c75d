#include "uot/report.hpp"

namespace uot {

std::string to_string(Termination t)
{
    switch (t) {
    case Termination::Converged:
        return "converged";
    case Termination::MaxIterations:
        return "max_iterations";
    case Termination::TrivialInput:
        return "trivial_input";
    }
    return "unknown";
}

}  // namespace uot
