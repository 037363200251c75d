#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "uot/cli/config.hpp"
#include "uot/cli/output.hpp"
#include "uot/cli/presets.hpp"
#include "uot/cli/run.hpp"
#include "uot/cli/selfcheck.hpp"

namespace fs = std::filesystem;
using namespace uot::cli;

int main(int argc, char** argv)
{
    CLI::App app{"Unnormalized optimal transport solvers (L1 static, L2 dynamic)"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Run a JSON configuration");
    run_cmd->add_option("config", config_path, "Configuration file")->required();

    std::string preset_name;
    std::string out_dir;
    bool emit_config = false;
    std::size_t max_iterations = 0;
    auto* preset_cmd = app.add_subcommand("preset", "Run or export one of the built-in experiments");
    preset_cmd->add_option("name", preset_name, "Preset name")->required();
    preset_cmd->add_option("--out", out_dir, "Base directory (default runs/<name>)");
    preset_cmd->add_flag("--emit-config", emit_config, "Write <out>/<name>.json and its inputs instead of running");
    preset_cmd->add_option("--max-iterations", max_iterations, "Override the solver iteration budget");

    auto* list_cmd = app.add_subcommand("presets", "List preset names");
    auto* check_cmd = app.add_subcommand("selfcheck", "Run the reference oracle suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    if (*run_cmd)
        return run_file(config_path, std::cerr);

    if (*list_cmd) {
        for (const auto& n : preset_names())
            std::cout << n << '\n';
        return kExitOk;
    }

    if (*check_cmd)
        return selfcheck(std::cout);

    try {
        const fs::path base = out_dir.empty() ? fs::path("runs") / preset_name : fs::path(out_dir);
        RunConfig cfg = preset(preset_name, base);
        if (max_iterations > 0) {
            cfg.uw2.max_outer = max_iterations;
            cfg.uw1.max_iters = max_iterations;
        }
        fs::create_directories(base);
        materialize_inputs(cfg);
        if (emit_config) {
            const fs::path file = base / (preset_name + ".json");
            write_json(file, to_json(cfg));
            std::cout << file.string() << '\n';
            return kExitOk;
        }
        return run(cfg, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}
