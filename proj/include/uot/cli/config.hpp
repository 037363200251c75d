#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "uot/densities.hpp"
#include "uot/uw1.hpp"
#include "uot/uw2.hpp"

namespace uot::cli {

inline constexpr int kSchemaVersion = 1;

/// Malformed, incomplete or inconsistent run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SolverKind { Uw1, Uw2 };
/// Spatial: source f(t,x). Temporal: source f(t), uniform in space.
enum class Variant { Spatial, Temporal };

struct DensityInput {
    enum class Kind { Gaussian, Image, Uniform };
    Kind kind = Kind::Gaussian;
    GaussianSpec gaussian;
    std::string path;  // relative paths resolve against the config's directory
    /// Image intensity multiplier, or the constant value of a uniform input.
    double scale = 1.0;
};

struct GridConfig {
    int dim = 1;
    int nx = 40;
    int ny = 1;
    double lx = 1.0;
    double ly = 1.0;
    int nt = 30;
};

struct OutputConfig {
    std::string directory = "out";
    bool csv = true;
    bool heatmaps = true;
    bool diagnostics = true;
};

struct RunConfig {
    std::string name;
    SolverKind solver = SolverKind::Uw2;
    std::vector<Variant> variants{Variant::Spatial};
    GridConfig grid;
    std::vector<double> alphas{1.0};
    /// uw2 in 1D only: the run is repeated on [0, L] for each L listed here,
    /// with the grid spacing of the configured grid. Inputs are built on the
    /// longer grid, so bumps stay put and uniform inputs fill the domain.
    std::vector<double> domain_sweep;
    uw2::SolverConfig uw2;
    uw1::PdhgConfig uw1;
    uw1::FluxNorm flux_norm = uw1::FluxNorm::L1;
    std::vector<DensityInput> mu0;
    std::vector<DensityInput> mu1;
    OutputConfig output;

    /// Directory that relative paths in the config are resolved against.
    std::filesystem::path base_dir = ".";

    /// Throws ConfigError. Does not touch the file system.
    void validate() const;
    /// The grid the solver runs on for the given domain length (0 = as configured).
    GridSpec solver_grid(double lx_override = 0.0) const;
    std::filesystem::path resolve(const std::string& path) const;
};

RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

std::string to_string(SolverKind s);
std::string to_string(Variant v);

}  // namespace uot::cli
