#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "minliq/commands.hpp"
#include "minliq/config.hpp"

using namespace minliq;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output;
};

void add_common(CLI::App* cmd, Common& c, bool with_output = true) {
    cmd->add_option("-c,--config", c.config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--set", c.overrides, "override a config key, e.g. --set sim.seed=7");
    if (with_output) cmd->add_option("-o,--output", c.output, "output directory");
}

RunConfig load(const Common& c) {
    RunConfig cfg = load_config(c.config_path);
    for (const auto& o : c.overrides) apply_override(cfg, o);
    return cfg;
}

std::optional<std::string> flag(const std::string& s) {
    return s.empty() ? std::nullopt : std::optional<std::string>(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimum-price liquidation: solve value functions, simulate and analyze"};
    app.require_subcommand(1);

    Common check_opts, solve_opts, sim_opts, sweep_opts;
    auto* check = app.add_subcommand("check", "validate parameters against the model assumptions");
    add_common(check, check_opts, false);

    auto* solve = app.add_subcommand("solve", "solve the value function and write grids plus manifest");
    add_common(solve, solve_opts);
    bool binary = false;
    solve->add_flag("--binary", binary, "write float64 binary grids");

    auto* simulate = app.add_subcommand("simulate", "simulate paths on solved grids");
    add_common(simulate, sim_opts);
    std::string grid_dir;
    simulate->add_option("--grid-dir", grid_dir, "directory holding manifest.json (default: output directory)");

    auto* analyze = app.add_subcommand("analyze", "summarize a records file");
    std::string records_path, baseline_path, analyze_out;
    analyze->add_option("-r,--records", records_path, "records CSV")->required();
    analyze->add_option("-b,--baseline", baseline_path, "baseline records CSV");
    analyze->add_option("-o,--output", analyze_out, "output directory");

    auto* sweep = app.add_subcommand("sweep", "solve, simulate and analyze over a parameter axis");
    add_common(sweep, sweep_opts);
    std::string axis;
    std::vector<double> values;
    sweep->add_option("--axis", axis, "ell or kV_over_eta")->required()->check(CLI::IsMember({"ell", "kV_over_eta"}));
    sweep->add_option("--values", values, "axis values")->required()->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    return run_guarded(std::cerr, [&]() -> int {
        if (*check) return cmd_check(load(check_opts), std::cout);
        if (*solve) {
            RunConfig cfg = load(solve_opts);
            if (binary) cfg.output.format = "binary";
            return cmd_solve(cfg, resolve_output_dir(cfg, flag(solve_opts.output)), std::cout);
        }
        if (*simulate) {
            RunConfig cfg = load(sim_opts);
            const std::string out = resolve_output_dir(cfg, flag(sim_opts.output));
            return cmd_simulate(cfg, grid_dir.empty() ? out : grid_dir, out, std::cout);
        }
        if (*analyze) {
            const char* env = std::getenv(kOutputDirEnv);
            const std::string out = !analyze_out.empty() ? analyze_out : (env && *env ? env : "out");
            return cmd_analyze(records_path, flag(baseline_path), out, std::cout);
        }
        RunConfig cfg = load(sweep_opts);
        return cmd_sweep(cfg, axis, values, resolve_output_dir(cfg, flag(sweep_opts.output)), std::cout);
    });
}
