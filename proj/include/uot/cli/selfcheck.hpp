#pragma once

#include <ostream>

namespace uot::cli {

/// Runs a small oracle suite (dense elliptic solve, finite-difference
/// gradient, analytic two-bump L1 value) and prints one PASS/FAIL line per
/// check. Returns 0 when everything passes.
int selfcheck(std::ostream& out);

}  // namespace uot::cli
