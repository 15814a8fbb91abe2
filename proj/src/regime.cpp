#include "minliq/regime.hpp"

#include <algorithm>
#include <cmath>

#include "minliq/errors.hpp"

namespace minliq {

const Grid1D& RegimeSolution::grid_for(double t, int interval) const {
    if (grids.empty()) throw GridMismatch("regime solution has no grids");
    switch (regime.kind) {
        case RegimeKind::PauseBelow:
            return t < t_switch ? grids[0] : grids[1];
        case RegimeKind::PauseWithBuffer: {
            const int n = static_cast<int>(grids.size());
            if (!regime.n_switches) return grids.back();
            const int idx = std::clamp(n - interval, 0, n - 1);
            return grids[static_cast<std::size_t>(idx)];
        }
        default:
            return grids[0];
    }
}

PdeOptions pde_options(const SolverSettings& settings) {
    PdeOptions o;
    o.p = 2.0;
    o.vol_bar = 1.0;
    o.diffusivity = 0.5;
    o.trunc_schedule = settings.trunc_schedule;
    o.tol = settings.tol;
    o.t_cut = settings.t_cut;
    return o;
}

GridSpec1D regime_grid_spec(const ModelParams& params, const RegimeSpec& regime,
                            const SolverSettings& settings) {
    const double w = settings.half_width * std::sqrt(params.T);
    std::vector<double> anchors = {regime.ell};
    if (regime.kind == RegimeKind::PauseWithBuffer) anchors.push_back(regime.ell + regime.b);
    GridSpec1D spec;
    spec.x = anchored_axis(std::min(-w, regime.ell - 1.0), std::max(w, regime.ell + regime.b + 1.0),
                           settings.dx, anchors);
    const bool split = regime.kind == RegimeKind::PauseBelow || regime.kind == RegimeKind::PauseWithBuffer;
    if (split && regime.delta > 0.0 && regime.delta < params.T)
        spec.t = regime_time_axis(params.T, regime.delta, settings.nt, settings.grading);
    else
        spec.t = graded_time_axis(0.0, params.T, settings.nt, settings.grading);
    return spec;
}

RegimeSolution solve_regime(const ModelParams& params, const RegimeSpec& regime,
                            const SolverSettings& settings) {
    const CanonicalParams cp = to_canonical(params, regime);
    const PdeOptions opts = pde_options(settings);
    const GridSpec1D spec = regime_grid_spec(params, regime, settings);

    RegimeSolution out;
    out.regime = regime;
    out.T = params.T;
    out.K_c = cp.K_c;
    out.t_switch = params.T - regime.delta;

    switch (regime.kind) {
        case RegimeKind::FullLiquidation: {
            auto s = solve_singular(spec, TerminalSpec::all_singular(), opts);
            out.grids.push_back(std::move(s.grid));
            out.certificate = std::move(s.certificate);
            break;
        }
        case RegimeKind::TerminalThreshold: {
            auto s = solve_singular(spec, TerminalSpec::threshold(regime.ell, cp.K_c), opts);
            out.grids.push_back(std::move(s.grid));
            out.certificate = std::move(s.certificate);
            break;
        }
        case RegimeKind::StopAtHit: {
            const std::size_t i = nearest_index(spec.x, regime.ell);
            GridSpec1D sub{spec.t, std::vector<double>(spec.x.begin() + static_cast<std::ptrdiff_t>(i), spec.x.end())};
            auto s = solve_regime2(sub, cp.K_c, opts);
            out.grids.push_back(std::move(s.grid));
            out.certificate = std::move(s.certificate);
            break;
        }
        case RegimeKind::PauseBelow: {
            auto s = solve_regime3(spec, regime.ell, regime.delta, cp.K_c, opts, settings.smoothing_eps);
            out.grids.push_back(std::move(s.v));
            out.grids.push_back(std::move(s.u_inf));
            out.certificate = std::move(s.certificate);
            break;
        }
        case RegimeKind::PauseWithBuffer: {
            auto s = solve_regime4(spec, regime.ell, regime.delta, regime.b, regime.n_switches, cp.K_c, opts);
            out.grids = std::move(s.u1);
            out.u0 = std::move(s.u0);
            out.sup_changes = std::move(s.sup_changes);
            out.certificate = std::move(s.certificate);
            break;
        }
    }
    return out;
}

}  // namespace minliq
