#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "uot/cli/config.hpp"
#include "uot/report.hpp"

namespace uot::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitConvergence = 2,
    kExitIngestion = 3,
};

struct CaseResult {
    std::filesystem::path directory;
    Variant variant = Variant::Spatial;
    double alpha = 0.0;
    double lx = 0.0;
    /// UW2 energy (the squared distance) or the UW1 primal value.
    double value = 0.0;
    Termination termination = Termination::MaxIterations;
};

struct RunResult {
    std::vector<CaseResult> cases;
    std::vector<std::string> warnings;
};

/// 0 (quiet), 1 (one line per case, the default) or 2 (also warnings),
/// read from UOT_VERBOSE.
int verbosity();

/// Sum of the listed inputs sampled on `grid`; Gaussian warnings are appended.
DensityField build_density(const RunConfig& cfg, const std::vector<DensityInput>& list, const GridSpec& grid,
                           std::vector<std::string>& warnings);

/// Builds every input first, then solves each (variant, domain length,
/// alpha) case and writes its artifacts. Throws on any failure.
RunResult execute(const RunConfig& cfg, std::ostream& log);

/// execute() with failures mapped onto exit codes and reported on `err`.
int run(const RunConfig& cfg, std::ostream& err);
int run_file(const std::filesystem::path& config_path, std::ostream& err);

}  // namespace uot::cli
