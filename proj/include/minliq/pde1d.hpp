#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "minliq/grid.hpp"

namespace minliq {

// vol(t, x); an empty function means the constant PdeOptions::vol_bar.
using VolFn = std::function<double(double t, double x)>;

enum class TerminalKind {
    ThresholdSingular,  // +inf on [ell, inf), -K below
    ConstantNeg,        // -K everywhere
    AllSingular,        // +inf everywhere
    Custom,             // bounded values on the x axis
};

struct TerminalSpec {
    TerminalKind kind = TerminalKind::ThresholdSingular;
    double ell = 0.0;
    double K = 0.0;               // terminal penalty level is -K
    std::vector<double> custom;   // Custom only, one value per node
    double mollify_m = 0.0;       // > 0: linear ramp on (ell - 1/m, ell)

    static TerminalSpec threshold(double ell, double K) {
        return {TerminalKind::ThresholdSingular, ell, K, {}, 0.0};
    }
    static TerminalSpec constant_neg(double K) { return {TerminalKind::ConstantNeg, 0.0, K, {}, 0.0}; }
    static TerminalSpec all_singular() { return {TerminalKind::AllSingular, 0.0, 0.0, {}, 0.0}; }
    static TerminalSpec from_values(std::vector<double> values, double K) {
        return {TerminalKind::Custom, 0.0, K, std::move(values), 0.0};
    }

    bool singular() const {
        return kind == TerminalKind::ThresholdSingular || kind == TerminalKind::AllSingular;
    }

    // Terminal data truncated at level n, i.e. min(Phi, n), on the axis x.
    std::vector<double> evaluate(const std::vector<double>& x, double trunc_n) const;
};

struct GridSpec1D {
    std::vector<double> t;  // ascending, t.back() is the terminal time
    std::vector<double> x;  // uniform
};

struct PdeOptions {
    double p = 2.0;
    VolFn vol;
    double vol_bar = 1.0;
    double diffusivity = 0.5;  // coefficient of u_xx
    std::vector<double> trunc_schedule = {1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
    double tol = 1e-3;    // relative sup-norm change between schedule levels
    double t_cut = 0.05;  // convergence is measured on [t0, T - t_cut]
};

struct TruncationCertificate {
    std::vector<double> levels;
    std::vector<double> deltas;          // relative change vs. previous level
    std::vector<double> min_increments;  // min over nodes of (u_n - u_prev) / max(1,|u_prev|)
    bool monotone = true;
    bool converged = false;
};

struct SingularSolution {
    Grid1D grid;
    TruncationCertificate certificate;
};

// One backward solve of u_t + D u_xx - vol |u|^p = 0 with terminal min(Phi, n)
// and zero-curvature lateral boundaries.
Grid1D solve_truncated(const GridSpec1D& spec, const TerminalSpec& terminal, double trunc_n,
                       const PdeOptions& opts);

// Minimal solution as the limit of truncated solves over opts.trunc_schedule.
SingularSolution solve_singular(const GridSpec1D& spec, const TerminalSpec& terminal,
                                const PdeOptions& opts);

// Stop-at-first-hit problem on [ell, x_max]: Dirichlet -K at x = ell (spec.x
// must start at ell), +inf at t = T.
SingularSolution solve_regime2(const GridSpec1D& spec, double K, const PdeOptions& opts);

struct Regime3Solution {
    Grid1D u_inf;  // [T - delta, T] x [ell, x_max]
    Grid1D v;      // [0, T - delta] x full axis
    TruncationCertificate certificate;
};

// Pause-below-ell problem. spec.t must contain T - delta as a node and spec.x
// must contain ell. smoothing_eps > 0 replaces the indicator 1{x > ell} in the
// nonlinearity by its Lipschitz ramp of width eps.
Regime3Solution solve_regime3(const GridSpec1D& spec, double ell, double delta, double K,
                              const PdeOptions& opts, double smoothing_eps = 0.0);

struct RecursionState {
    Grid1D u_inf;             // shared slab on [T - delta, T] x [ell, x_max]
    std::vector<Grid1D> u1;   // u1[n-1] = u_{1,n} on [0, T] x [ell, x_max]
    std::vector<Grid1D> u0;   // u0[n-1] = u_{0,n} on [0, T - delta] x [x_min, ell + b]
    int n = 0;
    std::vector<double> sup_changes;  // sup |u_{1,n+1} - u_{1,n}| on [0, T - delta]
    TruncationCertificate certificate;
};

// Switch-budget recursion u_{1,1} -> u_{0,1} -> u_{1,2} -> ... for the
// pause-with-buffer regime. With n_switches unset the recursion runs until the
// sup change drops below opts.tol (at most 200 levels).
RecursionState solve_regime4(const GridSpec1D& spec, double ell, double delta, double b,
                             std::optional<int> n_switches, double K, const PdeOptions& opts);

// Time axis with T - delta as a node: uniform on [0, T - delta], graded on
// [T - delta, T]. delta = 0 gives a single graded axis.
std::vector<double> regime_time_axis(double T, double delta, int nt, double grading);

}  // namespace minliq
