#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "minliq/model.hpp"
#include "minliq/path_sim.hpp"
#include "minliq/regime.hpp"

namespace minliq {

struct SVSolverSettings {
    int n_nu = 48;
    int n_s = 96;
    int substeps = 1;
    std::string vol = "constant";  // "constant" or "inv_nu" (vol_bar / (1 + nu))
};

struct SimSettings {
    std::uint64_t seed = 20240501;
    std::size_t n_paths = 10000;
    int n_steps = 2000;
    bool antithetic = false;
    bool bridge_correction = false;
    std::vector<std::uint64_t> dump_paths;
};

struct OutputSettings {
    std::string directory = "out";
    std::string format = "csv";  // csv or binary
};

struct RunConfig {
    ModelParams model;
    std::optional<SVParams> sv;
    RegimeSpec regime;
    SolverSettings solver;
    SVSolverSettings sv_solver;
    SimSettings sim;
    OutputSettings output;
};

// Sectioned key = value text. Unknown sections or keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Applies "section.key=value".
void apply_override(RunConfig& config, const std::string& assignment);

// Canonical text of everything that determines the solved grids.
std::string grid_identity(const RunConfig& config);

// Same form as the input format.
std::string to_ini(const RunConfig& config);

BatchSettings batch_settings(const RunConfig& config);

}  // namespace minliq
