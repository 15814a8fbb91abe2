#include "minliq/path_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "minliq/errors.hpp"

namespace minliq {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index, std::uint32_t salt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), salt};
    return std::mt19937_64(seq);
}

}  // namespace

BrownianPath gen_path(std::uint64_t seed, std::uint64_t path_index, int n_steps, double T, bool antithetic) {
    if (n_steps < 100) throw DomainError("path needs at least 100 steps");
    BrownianPath p;
    p.seed = seed;
    p.index = path_index;
    p.n_steps = n_steps;
    p.T = T;
    p.dt = T / n_steps;
    p.w.resize(static_cast<std::size_t>(n_steps) + 1);
    const bool mirror = antithetic && (path_index % 2 == 1);
    auto rng = stream(seed, mirror ? path_index - 1 : path_index, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd = std::sqrt(p.dt);
    p.w[0] = 0.0;
    for (int i = 0; i < n_steps; ++i) p.w[i + 1] = p.w[i] + sd * normal(rng);
    if (mirror)
        for (double& v : p.w) v = -v;
    return p;
}

BrownianPath coarsen(const BrownianPath& path, int factor) {
    if (factor < 1 || path.n_steps % factor != 0) throw DomainError("coarsening factor must divide n_steps");
    BrownianPath c = path;
    c.n_steps = path.n_steps / factor;
    c.dt = path.T / c.n_steps;
    c.w.clear();
    for (std::size_t i = 0; i < path.w.size(); i += static_cast<std::size_t>(factor)) c.w.push_back(path.w[i]);
    return c;
}

RegimeTrace trace_regime(const BrownianPath& path, const RegimeSpec& regime, const TraceOptions& options) {
    const std::size_t n = static_cast<std::size_t>(path.n_steps);
    RegimeTrace tr;
    tr.indicator.assign(n + 1, 1);
    tr.interval.assign(n + 1, 1);
    const double ell = regime.ell;
    const auto& w = path.w;

    switch (regime.kind) {
        case RegimeKind::FullLiquidation:
            tr.n_trades = 1;
            tr.must_close = true;
            return tr;
        case RegimeKind::TerminalThreshold:
            tr.n_trades = 1;
            tr.must_close = w[n] >= ell;
            return tr;
        default:
            break;
    }

    auto rng = stream(options.seed, path.index, 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto below = [&](std::size_t i) {
        const double draw = options.bridge_correction ? unif(rng) : 1.0;
        if (w[i] < ell) return true;
        if (!options.bridge_correction || i == 0 || w[i - 1] < ell) return false;
        return draw < std::exp(-2.0 * (w[i - 1] - ell) * (w[i] - ell) / path.dt);
    };

    const bool has_tail = regime.kind != RegimeKind::StopAtHit;
    const double t_switch = has_tail ? path.T - regime.delta : path.T + 1.0;
    const bool buffer = regime.kind == RegimeKind::PauseWithBuffer;
    const double resume_level = buffer ? ell + regime.b : ell;

    bool active = w[0] >= ell;
    bool dead = false;
    int intervals = active ? 1 : 0;
    if (!active) {
        tr.tau_ell = 0;
        tr.switch_times.emplace_back(0, std::nullopt);
    }
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) * path.dt;
        const bool in_tail = t >= t_switch - 1e-12;
        const bool is_below = i == 0 ? w[0] < ell : below(i);
        if (!dead) {
            if (regime.kind == RegimeKind::StopAtHit || in_tail) {
                if (!active || is_below) {
                    if (active) tr.switch_times.emplace_back(i, std::nullopt);
                    active = false;
                    dead = true;
                }
            } else if (active && is_below) {
                active = false;
                tr.switch_times.emplace_back(i, std::nullopt);
            } else if (!active && w[i] >= resume_level && !is_below) {
                const bool budget = !regime.n_switches || intervals < *regime.n_switches;
                if (budget) {
                    active = true;
                    ++intervals;
                    if (!tr.switch_times.empty()) tr.switch_times.back().second = i;
                }
            }
            if (is_below && !tr.tau_ell) tr.tau_ell = i;
        }
        tr.indicator[i] = active ? 1 : 0;
        tr.interval[i] = active ? intervals : 0;
    }
    tr.n_trades = intervals;
    tr.must_close = tr.indicator[n] == 1;
    return tr;
}

namespace {

struct CellValue {
    double a = 0.0;
    double b = 0.0;
    bool harmonic = false;
};

double cell_interp(const CellValue& c, double lam) {
    if (c.harmonic) return 1.0 / ((1.0 - lam) / c.a + lam / c.b);
    return (1.0 - lam) * c.a + lam * c.b;
}

// Exact integral of the cell interpolant between values ua and ub over a
// piece of length h.
double piece_integral(double ua, double ub, double h, bool harmonic) {
    if (!harmonic) return 0.5 * h * (ua + ub);
    const double wa = 1.0 / ua;
    const double r = (1.0 / ub - wa) / wa;
    const double f = std::abs(r) < 1e-8 ? 1.0 - 0.5 * r : std::log1p(r) / r;
    return h * ua * f;
}

double spatial_value(const Grid1D& g, std::size_t j, double x) {
    const double dx = g.x[1] - g.x[0];
    const double r = std::clamp((x - g.x.front()) / dx, 0.0, static_cast<double>(g.nx() - 1));
    std::size_t i = static_cast<std::size_t>(r);
    if (i >= g.nx() - 1) i = g.nx() - 2;
    const double wx = r - static_cast<double>(i);
    return (1.0 - wx) * g(j, i) + wx * g(j, i + 1);
}

double integrate_rate(const Grid1D& g, double a, double b, double x) {
    if (g.nt() < 2) return 0.0;
    const double lo = std::max(a, g.t.front());
    const double hi = std::min(b, g.t.back());
    if (!(hi > lo)) return 0.0;
    std::size_t j = locate(g.t, lo).j;
    double total = 0.0;
    for (; j + 1 < g.nt() && g.t[j] < hi; ++j) {
        const double p0 = std::max(lo, g.t[j]);
        const double p1 = std::min(hi, g.t[j + 1]);
        if (!(p1 > p0)) continue;
        CellValue c{spatial_value(g, j, x), spatial_value(g, j + 1, x), false};
        c.harmonic = c.a > 0.0 && c.b > 0.0;
        const double len = g.t[j + 1] - g.t[j];
        const double ua = cell_interp(c, (p0 - g.t[j]) / len);
        const double ub = cell_interp(c, (p1 - g.t[j]) / len);
        total += piece_integral(ua, ub, p1 - p0, c.harmonic);
    }
    return total;
}

}  // namespace

std::vector<double> integrate_q(const BrownianPath& path, const RegimeTrace& trace, const RegimeSolution& solution) {
    if (std::abs(solution.T - path.T) > 1e-12) throw GridMismatch("grid horizon differs from path horizon");
    if (solution.grids.empty()) throw GridMismatch("no value grid");
    if (solution.regime.kind == RegimeKind::PauseBelow && solution.grids.size() != 2)
        throw GridMismatch("pause-below regime needs two grids");
    const std::size_t n = static_cast<std::size_t>(path.n_steps);
    if (trace.indicator.size() != n + 1) throw GridMismatch("trace does not match path");
    const bool split = solution.regime.kind == RegimeKind::PauseBelow;

    std::vector<double> q(n + 1);
    q[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!trace.indicator[i]) {
            q[i + 1] = q[i];
            continue;
        }
        if (i + 1 == n && trace.must_close) {
            q[i + 1] = 0.0;
            continue;
        }
        const double t0 = static_cast<double>(i) * path.dt;
        const double t1 = i + 1 == n ? path.T : static_cast<double>(i + 1) * path.dt;
        const double x = 0.5 * (path.w[i] + path.w[i + 1]);
        const int k = trace.interval[i];
        double rate = 0.0;
        if (split && t0 < solution.t_switch && t1 > solution.t_switch) {
            rate = integrate_rate(solution.grids[0], t0, solution.t_switch, x) +
                   integrate_rate(solution.grids[1], solution.t_switch, t1, x);
        } else {
            rate = integrate_rate(solution.grid_for(0.5 * (t0 + t1), k), t0, t1, x);
        }
        q[i + 1] = q[i] * std::exp(-rate);
    }
    return q;
}

CashResult account_cash(const BrownianPath& path, const std::vector<double>& q, const ModelParams& params) {
    const std::size_t n = static_cast<std::size_t>(path.n_steps);
    const double Q0 = params.q0;
    const double dt = path.dt;
    const double cost = params.eta / params.V;
    CashResult r;

    // direct sum of -(S + eta Q'/V) Q' dt
    double X = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double Qa = Q0 * q[i];
        const double Qb = Q0 * q[i + 1];
        const double dQ = Qb - Qa;
        const double S = params.S0 + params.sigma * path.w[i] + params.k * (0.5 * (Qa + Qb) - Q0);
        X -= S * dQ + cost * dQ * dQ / dt;
    }
    r.XT = X;

    // integration by parts with the Ito sum of Q dS
    const double K = params.K();
    const double QT = Q0 * q[n];
    const double ST = params.S0 + params.sigma * path.w[n] + params.k * (QT - Q0);
    double ito = 0.0;
    double penalty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ito += Q0 * q[i] * params.sigma * (path.w[i + 1] - path.w[i]);
        const double d = Q0 * (q[i + 1] - q[i]);
        penalty += d * d;
    }
    r.XT_closed = Q0 * params.S0 - K * Q0 * Q0 + K * QT * QT + ito - cost * penalty / dt - QT * ST;
    return r;
}

Decomposition decompose_A(const BrownianPath& path, const std::vector<double>& q, const ModelParams& params) {
    const std::size_t n = static_cast<std::size_t>(path.n_steps);
    const double closed = 1.0 - q[n];
    if (closed == 0.0) throw NoTrades();
    const CanonicalParams cp = to_canonical(params, RegimeSpec{});
    double a2 = 0.0;
    double a3 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = q[i + 1] - q[i];
        a2 += path.w[i] * d;
        a3 += d * d;
    }
    Decomposition d;
    d.A1 = closed;
    d.A2 = a2 / closed;
    d.A3 = a3 / path.dt / closed;
    d.A = cp.coef_A1 * d.A1 - cp.coef_A2 * d.A2 - cp.coef_A3 * d.A3;
    return d;
}

double direct_A(double XT, double fqT, const ModelParams& params) {
    const double base = params.q0 * (1.0 - fqT) * params.S0;
    return (XT - base) / base;
}

PathRecord simulate_path(const BrownianPath& path, const ModelParams& params, const RegimeSolution& solution,
                         const BatchSettings& settings) {
    TraceOptions topt;
    topt.bridge_correction = settings.bridge_correction;
    topt.seed = settings.seed;
    const RegimeTrace trace = trace_regime(path, solution.regime, topt);
    std::vector<double> q = integrate_q(path, trace, solution);

    PathRecord rec;
    rec.path_index = path.index;
    rec.fqT = q.back();
    rec.wT = path.w.back();
    rec.n_trades = trace.n_trades;
    rec.liquidated = rec.fqT < kLiquidationEps;
    const CashResult cash = account_cash(path, q, params);
    rec.XT = cash.XT;
    rec.XT_closed = cash.XT_closed;
    try {
        const Decomposition d = decompose_A(path, q, params);
        rec.A1 = d.A1;
        rec.A2 = d.A2;
        rec.A3 = d.A3;
        rec.A = d.A;
    } catch (const NoTrades&) {
        rec.no_trades = true;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rec.A1 = 0.0;
        rec.A2 = rec.A3 = rec.A = nan;
    }
    if (std::find(settings.dump_indices.begin(), settings.dump_indices.end(), path.index) !=
        settings.dump_indices.end()) {
        rec.q_traj = std::move(q);
        rec.w = path.w;
    }
    return rec;
}

std::vector<PathRecord> run_batch(const ModelParams& params, const RegimeSolution& solution,
                                  const BatchSettings& settings) {
    if (std::abs(solution.T - params.T) > 1e-12) throw GridMismatch("grid horizon differs from config");
    std::vector<PathRecord> out;
    out.reserve(settings.n_paths);
    for (std::size_t i = 0; i < settings.n_paths; ++i) {
        const BrownianPath path = gen_path(settings.seed, i, settings.n_steps, params.T, settings.antithetic);
        out.push_back(simulate_path(path, params, solution, settings));
    }
    return out;
}

}  // namespace minliq
