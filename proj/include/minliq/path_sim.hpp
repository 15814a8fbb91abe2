#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "minliq/model.hpp"
#include "minliq/regime.hpp"

namespace minliq {

inline constexpr double kLiquidationEps = 1e-6;

// Brownian driver in sigma units, w[0] = 0.
struct BrownianPath {
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    int n_steps = 0;
    double T = 1.0;
    double dt = 0.0;
    std::vector<double> w;
};

// Deterministic in (seed, path_index). With antithetic set, odd indices are
// the negation of the preceding even index.
BrownianPath gen_path(std::uint64_t seed, std::uint64_t path_index, int n_steps, double T,
                      bool antithetic = false);

// Every factor-th point of a path.
BrownianPath coarsen(const BrownianPath& path, int factor);

struct RegimeTrace {
    std::vector<std::uint8_t> indicator;  // I at each grid time; step i uses indicator[i]
    std::vector<int> interval;            // 1-based trading interval of step i, 0 when paused
    std::optional<std::size_t> tau_ell;   // first index below ell
    std::vector<std::pair<std::size_t, std::optional<std::size_t>>> switch_times;
    int n_trades = 0;   // trading intervals entered
    bool must_close = false;  // liquidation event at T
};

struct TraceOptions {
    bool bridge_correction = false;
    std::uint64_t seed = 0;  // stream for bridge crossing draws
};

RegimeTrace trace_regime(const BrownianPath& path, const RegimeSpec& regime,
                         const TraceOptions& options = {});

// Position path Q_t / q0. The rate u is integrated exactly in time on each
// step under an interpolation that is linear in 1/u where u > 0 (linear in u
// otherwise), at the midpoint of the spatial increment.
std::vector<double> integrate_q(const BrownianPath& path, const RegimeTrace& trace,
                                const RegimeSolution& solution);

struct CashResult {
    double XT = 0.0;
    double XT_closed = 0.0;
};

// q is Q_t / q0 on the path's partition.
CashResult account_cash(const BrownianPath& path, const std::vector<double>& q, const ModelParams& params);

struct Decomposition {
    double A1 = 0.0;
    double A2 = 0.0;
    double A3 = 0.0;
    double A = 0.0;
};

// Throws NoTrades when the position never moved.
Decomposition decompose_A(const BrownianPath& path, const std::vector<double>& q, const ModelParams& params);

// A from its definition, (X_T - (Q0 - QT) S0) / ((Q0 - QT) S0).
double direct_A(double XT, double fqT, const ModelParams& params);

struct PathRecord {
    std::uint64_t path_index = 0;
    double fqT = 1.0;
    double XT = 0.0;
    double XT_closed = 0.0;
    double A1 = 0.0;
    double A2 = 0.0;
    double A3 = 0.0;
    double A = 0.0;
    bool liquidated = false;
    bool no_trades = false;
    int n_trades = 0;
    double wT = 0.0;
    std::vector<double> q_traj;  // filled for dumped paths only
    std::vector<double> w;
};

struct BatchSettings {
    std::uint64_t seed = 20240501;
    std::size_t n_paths = 10000;
    int n_steps = 2000;
    bool antithetic = false;
    bool bridge_correction = false;
    std::vector<std::uint64_t> dump_indices;
};

PathRecord simulate_path(const BrownianPath& path, const ModelParams& params, const RegimeSolution& solution,
                         const BatchSettings& settings);

// Records in path-index order.
std::vector<PathRecord> run_batch(const ModelParams& params, const RegimeSolution& solution,
                                  const BatchSettings& settings);

}  // namespace minliq
