#include "uot/cli/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>

#include "uot/cli/output.hpp"
#include "uot/densities.hpp"
#include "uot/uw1.hpp"
#include "uot/uw2.hpp"

namespace uot::cli {

using nlohmann::json;
namespace fs = std::filesystem;

int verbosity()
{
    const char* v = std::getenv("UOT_VERBOSE");
    if (!v || !*v)
        return 1;
    return std::clamp(std::atoi(v), 0, 2);
}

namespace {

struct Inputs {
    double lx = 0.0;
    DensityField mu0;
    DensityField mu1;
};

std::string label(const char* prefix, double v)
{
    return std::string(prefix) + format_double(v);
}

void write_uw2(const RunConfig& cfg, const fs::path& dir, const uw2::Solution& sol, const GridSpec& g)
{
    const auto& slices = sol.path.slices;
    if (cfg.output.csv)
        for (std::size_t n = 0; n < slices.size(); ++n) {
            char name[32];
            std::snprintf(name, sizeof(name), "slice_%03zu.csv", n);
            write_field_csv(dir / name, slices[n].values(), g.nx, g.ny, g.dx(), g.dim == 2 ? g.dy() : 1.0);
        }
    if (cfg.output.heatmaps) {
        double top = 0.0;
        for (const auto& s : slices)
            top = std::max(top, s.max());
        if (g.dim == 1) {
            // One image row per time slice, t = 0 at the top.
            std::vector<double> img(static_cast<std::size_t>(g.nx) * slices.size());
            const int rows = static_cast<int>(slices.size());
            for (int i = 0; i < g.nx; ++i)
                for (int n = 0; n < rows; ++n)
                    img[static_cast<std::size_t>(i) * rows + (rows - 1 - n)] = slices[n][static_cast<std::size_t>(i)];
            write_heatmap(dir / "path.pgm", img, g.nx, rows, top);
        } else {
            for (std::size_t n = 0; n < slices.size(); ++n) {
                char name[32];
                std::snprintf(name, sizeof(name), "slice_%03zu.pgm", n);
                write_heatmap(dir / name, slices[n].values(), g.nx, g.ny, top);
            }
        }
    }
}

void write_uw1(const RunConfig& cfg, const fs::path& dir, const uw1::Problem& problem, const uw1::Solution& sol)
{
    const GridSpec& g = problem.grid();
    const double dy = g.dim == 2 ? g.dy() : 1.0;
    const StaggeredFlux& m = sol.state.flux;

    // Flux magnitude at cell centres from the averaged face values.
    std::vector<double> mag(g.cells());
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double a = 0.5 * (m.mx(i, j) + m.mx(i + 1, j));
            const double b = g.dim == 2 ? 0.5 * (m.my(i, j) + m.my(i, j + 1)) : 0.0;
            mag[g.index(i, j)] = problem.norm == uw1::FluxNorm::L1 ? std::abs(a) + std::abs(b) : std::hypot(a, b);
        }

    if (cfg.output.csv) {
        write_field_csv(dir / "mu0.csv", problem.mu0.values(), g.nx, g.ny, g.dx(), dy);
        write_field_csv(dir / "mu1.csv", problem.mu1.values(), g.nx, g.ny, g.dx(), dy);
        write_field_csv(dir / "flux_x.csv", m.mx_data(), g.nx + 1, g.ny, g.dx(), dy);
        if (g.dim == 2)
            write_field_csv(dir / "flux_y.csv", m.my_data(), g.nx, g.ny + 1, g.dx(), dy);
        write_field_csv(dir / "flux_magnitude.csv", mag, g.nx, g.ny, g.dx(), dy);
        write_field_csv(dir / "source.csv", sol.state.source.values(), g.nx, g.ny, g.dx(), dy);
        write_field_csv(dir / "potential.csv", sol.state.phi.values(), g.nx, g.ny, g.dx(), dy);
    }
    if (cfg.output.heatmaps && g.dim == 2) {
        write_heatmap(dir / "flux_magnitude.pgm", mag, g.nx, g.ny, *std::max_element(mag.begin(), mag.end()));
        std::vector<double> src(g.cells());
        for (std::size_t k = 0; k < src.size(); ++k)
            src[k] = std::abs(sol.state.source[k]);
        write_heatmap(dir / "source.pgm", src, g.nx, g.ny, *std::max_element(src.begin(), src.end()));
    }
}

json history_json(const SolveReport& report, bool uw2_names)
{
    json h = json::array();
    for (const IterationRecord& r : report.history) {
        if (uw2_names)
            h.push_back({{"iteration", r.iteration}, {"energy", r.objective}, {"hj_residual", r.residual}});
        else
            h.push_back({{"iteration", r.iteration},
                         {"primal", r.objective},
                         {"residual", r.residual},
                         {"gap", r.gap},
                         {"dual", r.dual_bound}});
    }
    return h;
}

}  // namespace

DensityField build_density(const RunConfig& cfg, const std::vector<DensityInput>& list, const GridSpec& grid,
                           std::vector<std::string>& warnings)
{
    ScalarField sum(grid);
    for (const DensityInput& in : list) {
        if (in.kind == DensityInput::Kind::Uniform) {
            for (std::size_t k = 0; k < sum.size(); ++k)
                sum[k] += in.scale;
            continue;
        }
        const DensityField d = [&] {
            if (in.kind == DensityInput::Kind::Image)
                return load_image_density(cfg.resolve(in.path).string(), grid, in.scale);
            DensityResult r = gaussian_density(grid, in.gaussian);
            warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
            return std::move(r.density);
        }();
        for (std::size_t k = 0; k < sum.size(); ++k)
            sum[k] += d[k];
    }
    return DensityField(std::move(sum));
}

RunResult execute(const RunConfig& cfg, std::ostream& log)
{
    cfg.validate();
    const int verbose = verbosity();
    RunResult result;

    // Inputs first, so a bad image fails before anything is written.
    std::vector<Inputs> inputs;
    std::vector<double> lengths = cfg.domain_sweep;
    if (lengths.empty())
        lengths.push_back(0.0);
    for (double l : lengths) {
        const GridSpec g = cfg.solver_grid(l);
        std::vector<std::string> w;
        DensityField a = build_density(cfg, cfg.mu0, g, w);
        DensityField b = build_density(cfg, cfg.mu1, g, w);
        if (inputs.empty())
            result.warnings = w;
        inputs.push_back({l, std::move(a), std::move(b)});
    }

    const fs::path root = cfg.resolve(cfg.output.directory);
    fs::create_directories(root);
    json cases = json::array();

    for (Variant variant : cfg.variants) {
        for (const Inputs& in : inputs) {
            for (double alpha : cfg.alphas) {
                fs::path dir = root;
                if (cfg.variants.size() > 1)
                    dir /= to_string(variant);
                if (in.lx > 0.0)
                    dir /= label("lx_", in.lx);
                dir /= label("alpha_", alpha);
                fs::create_directories(dir);

                CaseResult cr;
                cr.directory = dir;
                cr.variant = variant;
                cr.alpha = alpha;
                cr.lx = in.mu0.grid().lx;
                json diag = {{"solver", to_string(cfg.solver)},
                             {"variant", to_string(variant)},
                             {"alpha", alpha},
                             {"lx", cr.lx},
                             {"mass_mu0", total_mass(in.mu0)},
                             {"mass_mu1", total_mass(in.mu1)},
                             {"warnings", result.warnings}};

                if (cfg.solver == SolverKind::Uw2) {
                    uw2::Problem p{in.mu0, in.mu1, alpha,
                                   variant == Variant::Spatial ? OperatorVariant::SpatiallyDependent
                                                               : OperatorVariant::SpatiallyIndependent};
                    const uw2::Solution sol = uw2::solve(p, cfg.uw2);
                    cr.value = sol.energy;
                    cr.termination = sol.report.termination;
                    write_uw2(cfg, dir, sol, p.grid());
                    diag["energy"] = sol.energy;
                    diag["distance"] = std::sqrt(std::max(0.0, sol.energy));
                    diag["hj_residual"] = sol.hj_residual;
                    diag["final_tau"] = sol.final_tau;
                    diag["iterations"] = sol.report.iterations;
                    diag["cg_iterations"] = sol.report.cg_iterations;
                    diag["termination"] = to_string(sol.report.termination);
                    diag["wall_seconds"] = sol.report.wall_seconds;
                    diag["history"] = history_json(sol.report, true);
                } else {
                    const GridSpec& g = in.mu0.grid();
                    uw1::Problem p{in.mu0, in.mu1, alpha, cfg.flux_norm,
                                   variant == Variant::Spatial ? uw1::SourceVariant::SpatiallyDependent
                                                               : uw1::SourceVariant::SpatiallyIndependent};
                    const uw1::Solution sol = uw1::solve(p, cfg.uw1);
                    cr.value = sol.primal;
                    cr.termination = sol.report.termination;
                    write_uw1(cfg, dir, p, sol);
                    double source_mass = 0.0;
                    for (double v : sol.state.source.values())
                        source_mass += v;
                    diag["primal"] = sol.primal;
                    diag["feasible_primal"] = sol.feasible_primal;
                    diag["dual"] = sol.dual.value;
                    diag["dual_scale"] = sol.dual.scale;
                    diag["gap"] = sol.gap;
                    diag["residual"] = sol.residual;
                    diag["source_mass"] = source_mass * g.cell_volume();
                    diag["mass_difference"] = p.mass_difference();
                    diag["iterations"] = sol.report.iterations;
                    diag["termination"] = to_string(sol.report.termination);
                    diag["wall_seconds"] = sol.report.wall_seconds;
                    diag["history"] = history_json(sol.report, false);
                }
                if (cfg.output.diagnostics)
                    write_json(dir / "diagnostics.json", diag);

                const std::string rel = fs::relative(dir, root).generic_string();
                if (cr.termination == Termination::MaxIterations)
                    result.warnings.push_back(rel + ": iteration budget reached before the stopping rule was met");
                if (verbose >= 1)
                    log << rel << ": value=" << format_double(cr.value) << " (" << to_string(cr.termination)
                        << ")\n";
                cases.push_back({{"directory", rel},
                                 {"variant", to_string(variant)},
                                 {"alpha", alpha},
                                 {"lx", cr.lx},
                                 {"value", cr.value},
                                 {"termination", to_string(cr.termination)}});
                result.cases.push_back(std::move(cr));
            }
        }
    }
    if (cfg.output.diagnostics)
        write_json(root / "summary.json", {{"config", to_json(cfg)}, {"cases", cases}, {"warnings", result.warnings}});
    if (verbose >= 2)
        for (const auto& w : result.warnings)
            log << "warning: " << w << '\n';
    return result;
}

int run(const RunConfig& cfg, std::ostream& err)
{
    try {
        const RunResult r = execute(cfg, err);
        for (const CaseResult& c : r.cases)
            if (c.termination == Termination::MaxIterations && verbosity() >= 1) {
                err << "warning: some cases stopped at the iteration budget\n";
                break;
            }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IngestionError& e) {
        err << "input error: " << e.what() << '\n';
        return kExitIngestion;
    } catch (const ConvergenceError& e) {
        err << "convergence failure: " << e.what() << " (relative residual " << e.residual() << " after "
            << e.iterations() << " iterations)\n";
        return kExitConvergence;
    } catch (const StepSizeError& e) {
        err << "convergence failure: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const StructuralError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        // Unwritable output locations land here.
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

int run_file(const fs::path& config_path, std::ostream& err)
{
    try {
        return run(load_config(config_path), err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace uot::cli
