#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "minliq/config.hpp"
#include "minliq/pde_sv.hpp"
#include "minliq/regime.hpp"

namespace minliq {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitAssumption = 2,
    kExitNoConvergence = 3,
    kExitIo = 4,
};

inline constexpr const char* kOutputDirEnv = "MINLIQ_OUTPUT_DIR";

// Output directory: explicit flag, then the environment, then the config.
std::string resolve_output_dir(const RunConfig& config, const std::optional<std::string>& flag);

std::string config_hash(const RunConfig& config);

int cmd_check(const RunConfig& config, std::ostream& out);
int cmd_solve(const RunConfig& config, const std::string& out_dir, std::ostream& out);
int cmd_simulate(const RunConfig& config, const std::string& grid_dir, const std::string& out_dir,
                 std::ostream& out);
int cmd_analyze(const std::string& records_path, const std::optional<std::string>& baseline_path,
                const std::string& out_dir, std::ostream& out);
int cmd_sweep(const RunConfig& config, const std::string& axis, const std::vector<double>& values,
              const std::string& out_dir, std::ostream& out);

// Runs a command body and maps library errors to exit codes, printing the
// message to err.
int run_guarded(std::ostream& err, const std::function<int()>& body);

// Library entry points used by the commands.
RegimeSolution load_regime_solution(const RunConfig& config, const std::string& grid_dir);
SVSolution solve_sv_for_config(const RunConfig& config);

}  // namespace minliq
