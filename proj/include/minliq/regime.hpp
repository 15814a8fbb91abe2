#pragma once

#include <optional>
#include <vector>

#include "minliq/grid.hpp"
#include "minliq/model.hpp"
#include "minliq/pde1d.hpp"

namespace minliq {

struct SolverSettings {
    double dx = 0.02;
    double half_width = 6.0;  // domain is [-w sqrt(T), w sqrt(T)]
    int nt = 400;
    double grading = 5.0;
    double t_cut = 0.05;
    double tol = 1e-3;
    std::vector<double> trunc_schedule = {1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
    double smoothing_eps = 0.0;  // regime 3 only
};

// Solved value grids for one regime in canonical units (p = 2, vol = 1).
//   R0, R1: grids = {u}
//   R2:     grids = {u} on [ell, x_max]
//   R3:     grids = {v, u_inf}, v before t_switch and u_inf after
//   R4:     grids = {u_{1,1}, ..., u_{1,n}}
struct RegimeSolution {
    RegimeSpec regime;
    double T = 1.0;
    double K_c = 0.0;
    double t_switch = 0.0;  // T - delta for R3 and R4
    std::vector<Grid1D> grids;
    std::vector<Grid1D> u0;  // R4 only
    std::vector<double> sup_changes;
    TruncationCertificate certificate;

    // Grid used during the k-th trading interval (1-based) at time t.
    const Grid1D& grid_for(double t, int interval) const;
};

PdeOptions pde_options(const SolverSettings& settings);
GridSpec1D regime_grid_spec(const ModelParams& params, const RegimeSpec& regime,
                            const SolverSettings& settings);

// Canonical solve for p_hat = 2; throws UnsupportedExponent otherwise.
RegimeSolution solve_regime(const ModelParams& params, const RegimeSpec& regime,
                            const SolverSettings& settings);

}  // namespace minliq
