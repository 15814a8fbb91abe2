#pragma once

#include <functional>
#include <vector>

#include "minliq/grid.hpp"
#include "minliq/model.hpp"
#include "minliq/pde1d.hpp"

namespace minliq {

// vol(t, nu, s); empty means the constant SVOptions::vol_bar.
using VolFn2D = std::function<double(double t, double nu, double s)>;

struct SVGridSpec {
    std::vector<double> t;   // output time levels, ascending
    std::vector<double> nu;  // uniform, strictly positive
    std::vector<double> s;   // uniform
};

struct SVOptions {
    double p = 2.0;
    VolFn2D vol;
    double vol_bar = 1.0;
    double cfl = 0.9;  // fraction of the explicit stability limit
    int substeps = 1;  // minimum explicit steps per output interval
    std::vector<double> trunc_schedule = {1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
    double tol = 1e-3;
    double t_cut = 0.05;
    double value_scale = 1.0;  // unit of u in the relative convergence measure
};

struct SVSolution {
    Grid2D grid;
    TruncationCertificate certificate;
};

// Upper end of the variance axis: theta plus 8 stationary standard deviations.
double sv_nu_max(const SVParams& sv);

// n_nu nodes on (0, nu_max] with nu0 on a node.
std::vector<double> sv_nu_axis(const SVParams& sv, int n_nu);

// Smallest stable explicit step of the discrete operator on this grid.
double sv_stable_dt(const SVGridSpec& spec, const SVParams& sv);

// One backward solve with terminal min(Phi(s), n).
Grid2D solve_sv_truncated(const SVGridSpec& spec, const SVParams& sv, const TerminalSpec& terminal,
                          double trunc_n, const SVOptions& opts);

// Singular terminal data go through the truncation schedule, bounded data
// are solved once.
SVSolution solve_sv(const SVGridSpec& spec, const SVParams& sv, const TerminalSpec& terminal,
                    const SVOptions& opts);

}  // namespace minliq
