#include "minliq/pde1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "minliq/errors.hpp"
#include "minliq/model.hpp"
#include "minliq/reaction.hpp"
#include "minliq/tridiag.hpp"

namespace minliq {

std::vector<double> TerminalSpec::evaluate(const std::vector<double>& x, double trunc_n) const {
    std::vector<double> out(x.size());
    switch (kind) {
        case TerminalKind::ConstantNeg:
            std::fill(out.begin(), out.end(), -K);
            break;
        case TerminalKind::AllSingular:
            std::fill(out.begin(), out.end(), trunc_n);
            break;
        case TerminalKind::Custom:
            if (custom.size() != x.size()) throw DomainError("custom terminal does not match axis");
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::min(custom[i], trunc_n);
            break;
        case TerminalKind::ThresholdSingular:
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i] >= ell) {
                    out[i] = trunc_n;
                } else if (mollify_m > 0.0 && x[i] > ell - 1.0 / mollify_m) {
                    out[i] = (trunc_n + K) * mollify_m * (x[i] - ell + 1.0 / mollify_m) - K;
                } else {
                    out[i] = -K;
                }
            }
            break;
    }
    return out;
}

std::vector<double> regime_time_axis(double T, double delta, int nt, double grading) {
    if (delta <= 0.0 || delta >= T) return graded_time_axis(0.0, T, nt, grading);
    const int n_tail = std::max(50, static_cast<int>(std::lround(nt * delta / T)));
    const int n_head = std::max(50, nt - n_tail);
    auto axis = join_axes(uniform_axis(0.0, T - delta, n_head),
                          graded_time_axis(T - delta, T, n_tail, grading));
    return axis;
}

namespace {

struct Lateral {
    bool dirichlet = false;
    std::function<double(std::size_t)> value;  // by time level index
};

struct MarchProblem {
    const std::vector<double>* t = nullptr;
    const std::vector<double>* x = nullptr;
    std::vector<double> terminal;
    Lateral left;
    Lateral right;
    const PdeOptions* opts = nullptr;
    std::vector<double> weight;  // nonlinearity mask; empty means 1
    bool linear = false;
    double singular_time = 0.0;  // envelope reference; <= t.back() disables the check
};

void check_sizes(const GridSpec1D& spec) {
    if (spec.x.size() < 3 || spec.t.size() < 2) throw DomainError("grid too small");
    for (std::size_t j = 1; j < spec.t.size(); ++j)
        if (!(spec.t[j] > spec.t[j - 1])) throw DomainError("time axis must be increasing");
}

Grid1D march(const MarchProblem& m) {
    const auto& t = *m.t;
    const auto& x = *m.x;
    const auto& opts = *m.opts;
    const std::size_t nt = t.size();
    const std::size_t nx = x.size();
    const double dx = x[1] - x[0];
    const double p = opts.p;
    const bool const_vol = !opts.vol;
    const bool envelope_check =
        !m.linear && const_vol && m.weight.empty() && opts.vol_bar > 0.0 && m.singular_time > t.front();

    Grid1D g;
    g.t = t;
    g.x = x;
    g.values.resize(nt * nx);

    std::vector<double> u = m.terminal;
    std::copy(u.begin(), u.end(), g.values.begin() + static_cast<std::ptrdiff_t>((nt - 1) * nx));

    std::vector<double> lower(nx), diag(nx), upper(nx), a(nx, opts.vol_bar);
    TridiagonalSolver solver;
    const std::size_t i_begin = m.left.dirichlet ? 1 : 0;
    const std::size_t i_end = m.right.dirichlet ? nx - 1 : nx;

    for (std::size_t j = nt - 1; j-- > 0;) {
        const double h = t[j + 1] - t[j];
        const double tm = 0.5 * (t[j] + t[j + 1]);

        if (!m.linear) {
            for (std::size_t i = i_begin; i < i_end; ++i) {
                double ai = const_vol ? opts.vol_bar : opts.vol(tm, x[i]);
                if (!m.weight.empty()) ai *= m.weight[i];
                a[i] = ai;
                u[i] = react(u[i], ai, 0.5 * h, p);
            }
        }

        const double lam = opts.diffusivity * h / (dx * dx);
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            lower[i] = -lam;
            diag[i] = 1.0 + 2.0 * lam;
            upper[i] = -lam;
        }
        // Boundary rows are identities: Dirichlet nodes take their new value,
        // zero-curvature nodes only feel the reaction term.
        diag[0] = 1.0;
        upper[0] = 0.0;
        diag[nx - 1] = 1.0;
        lower[nx - 1] = 0.0;
        if (m.left.dirichlet) u[0] = m.left.value(j);
        if (m.right.dirichlet) u[nx - 1] = m.right.value(j);
        solver.solve(lower, diag, upper, u);

        if (!m.linear) {
            for (std::size_t i = i_begin; i < i_end; ++i) u[i] = react(u[i], a[i], 0.5 * h, p);
        }
        if (m.left.dirichlet) u[0] = m.left.value(j);
        if (m.right.dirichlet) u[nx - 1] = m.right.value(j);

        const double env = envelope_check
                               ? 10.0 * analytic_blowup_profile(p, opts.vol_bar, m.singular_time, t[j])
                               : std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nx; ++i) {
            if (!std::isfinite(u[i]) || u[i] > env) {
                std::ostringstream os;
                os << "value " << u[i] << " at t = " << t[j] << ", x = " << x[i];
                throw InstabilityDetected(os.str());
            }
        }
        std::copy(u.begin(), u.end(), g.values.begin() + static_cast<std::ptrdiff_t>(j * nx));
    }
    return g;
}

Grid1D march_truncated(const GridSpec1D& spec, const TerminalSpec& terminal, double trunc_n,
                       const PdeOptions& opts) {
    MarchProblem m;
    m.t = &spec.t;
    m.x = &spec.x;
    m.terminal = terminal.evaluate(spec.x, trunc_n);
    m.opts = &opts;
    m.singular_time = spec.t.back();
    auto g = march(m);
    g.trunc_level = trunc_n;
    return g;
}

struct Comparison {
    double delta = 0.0;
    double min_increment = 0.0;
};

Comparison compare_levels(const Grid1D& prev, const Grid1D& cur, double t_limit) {
    Comparison c;
    c.min_increment = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cur.nt(); ++j) {
        for (std::size_t i = 0; i < cur.nx(); ++i) {
            const double a = prev(j, i);
            const double b = cur(j, i);
            c.min_increment = std::min(c.min_increment, (b - a) / std::max(1.0, std::abs(a)));
            if (cur.t[j] <= t_limit)
                c.delta = std::max(c.delta, std::abs(b - a) / std::max(1.0, std::abs(b)));
        }
    }
    return c;
}

SingularSolution run_schedule(const std::function<Grid1D(double)>& solve_at, const PdeOptions& opts,
                              double t_limit) {
    if (opts.trunc_schedule.empty()) throw DomainError("empty truncation schedule");
    SingularSolution out;
    auto& cert = out.certificate;
    std::optional<Grid1D> prev;
    for (double n : opts.trunc_schedule) {
        Grid1D cur = solve_at(n);
        cert.levels.push_back(n);
        if (prev) {
            const auto c = compare_levels(*prev, cur, t_limit);
            cert.deltas.push_back(c.delta);
            cert.min_increments.push_back(c.min_increment);
            if (c.min_increment < -1e-12) cert.monotone = false;
            if (c.delta < opts.tol) {
                cert.converged = true;
                out.grid = std::move(cur);
                out.grid.trunc_level = kUntruncated;
                return out;
            }
        }
        prev = std::move(cur);
    }
    if (cert.levels.size() == 1) {
        // A single-level schedule is an explicit request for that truncation.
        cert.converged = true;
        out.grid = std::move(*prev);
        return out;
    }
    std::ostringstream os;
    os << "last relative change " << cert.deltas.back() << " >= tol " << opts.tol;
    throw NoConvergence(cert.deltas.back(), os.str());
}

std::size_t index_of(const std::vector<double>& axis, double value, const char* what) {
    const std::size_t i = nearest_index(axis, value);
    const double dx = axis[1] - axis[0];
    if (std::abs(axis[i] - value) > 1e-9 * std::max(1.0, std::abs(dx)))
        throw DomainError(std::string(what) + " is not a grid node");
    return i;
}

std::size_t time_index_of(const std::vector<double>& t, double value) {
    for (std::size_t j = 0; j < t.size(); ++j)
        if (std::abs(t[j] - value) <= 1e-12 * std::max(1.0, std::abs(value))) return j;
    throw DomainError("T - delta is not a time level");
}

Grid1D slice_time(const Grid1D& g, std::size_t j0, std::size_t j1) {
    Grid1D out;
    out.t.assign(g.t.begin() + static_cast<std::ptrdiff_t>(j0),
                 g.t.begin() + static_cast<std::ptrdiff_t>(j1 + 1));
    out.x = g.x;
    out.values.assign(g.values.begin() + static_cast<std::ptrdiff_t>(j0 * g.nx()),
                      g.values.begin() + static_cast<std::ptrdiff_t>((j1 + 1) * g.nx()));
    out.trunc_level = g.trunc_level;
    out.label = g.label;
    return out;
}

std::vector<double> sub_axis(const std::vector<double>& v, std::size_t i0, std::size_t i1) {
    return {v.begin() + static_cast<std::ptrdiff_t>(i0), v.begin() + static_cast<std::ptrdiff_t>(i1 + 1)};
}

Grid1D stack_time(const Grid1D& head, const Grid1D& tail) {
    Grid1D out;
    out.t = join_axes(head.t, tail.t);
    out.x = head.x;
    out.values = head.values;
    out.values.insert(out.values.end(), tail.values.begin() + static_cast<std::ptrdiff_t>(tail.nx()),
                      tail.values.end());
    out.trunc_level = tail.trunc_level;
    return out;
}

}  // namespace

Grid1D solve_truncated(const GridSpec1D& spec, const TerminalSpec& terminal, double trunc_n,
                       const PdeOptions& opts) {
    check_sizes(spec);
    if (spec.x.size() < 50 || spec.t.size() < 51)
        throw DomainError("solve_truncated needs nx >= 50 and nt >= 50");
    if (trunc_n < -terminal.K) throw DomainError("truncation level below -K");
    auto g = march_truncated(spec, terminal, trunc_n, opts);
    g.label = "u";
    return g;
}

SingularSolution solve_singular(const GridSpec1D& spec, const TerminalSpec& terminal,
                                const PdeOptions& opts) {
    check_sizes(spec);
    if (!terminal.singular()) throw DomainError("solve_singular needs a singular terminal");
    auto out = run_schedule(
        [&](double n) { return march_truncated(spec, terminal, n, opts); }, opts,
        spec.t.back() - opts.t_cut);
    out.grid.label = "u";
    return out;
}

SingularSolution solve_regime2(const GridSpec1D& spec, double K, const PdeOptions& opts) {
    check_sizes(spec);
    auto solve_at = [&](double n) {
        MarchProblem m;
        m.t = &spec.t;
        m.x = &spec.x;
        m.terminal.assign(spec.x.size(), n);
        m.terminal[0] = -K;
        m.left = {true, [K](std::size_t) { return -K; }};
        m.opts = &opts;
        m.singular_time = spec.t.back();
        auto g = march(m);
        g.trunc_level = n;
        return g;
    };
    auto out = run_schedule(solve_at, opts, spec.t.back() - opts.t_cut);
    out.grid.label = "u2";
    return out;
}

Regime3Solution solve_regime3(const GridSpec1D& spec, double ell, double delta, double K,
                              const PdeOptions& opts, double smoothing_eps) {
    check_sizes(spec);
    const double T = spec.t.back();
    const std::size_t i_ell = index_of(spec.x, ell, "ell");
    const std::size_t jd = delta >= T - spec.t.front() ? 0 : time_index_of(spec.t, T - delta);

    GridSpec1D tail{sub_axis(spec.t, jd, spec.t.size() - 1), sub_axis(spec.x, i_ell, spec.x.size() - 1)};
    auto stage1 = solve_regime2(tail, K, opts);

    Regime3Solution out;
    out.u_inf = std::move(stage1.grid);
    out.u_inf.label = "u_inf";
    out.certificate = std::move(stage1.certificate);

    std::vector<double> g(spec.x.size());
    for (std::size_t i = 0; i < spec.x.size(); ++i)
        g[i] = i > i_ell ? out.u_inf(0, i - i_ell) : -K;

    if (jd == 0) {
        out.v.t = {spec.t.front()};
        out.v.x = spec.x;
        out.v.values = g;
    } else {
        std::vector<double> head_t = sub_axis(spec.t, 0, jd);
        MarchProblem m;
        m.t = &head_t;
        m.x = &spec.x;
        m.terminal = g;
        m.opts = &opts;
        m.weight.resize(spec.x.size());
        for (std::size_t i = 0; i < spec.x.size(); ++i) {
            const double d = spec.x[i] - ell;
            if (smoothing_eps > 0.0)
                m.weight[i] = d <= 0.0 ? 0.0 : std::min(1.0, d / smoothing_eps);
            else
                m.weight[i] = i > i_ell ? 1.0 : 0.0;
        }
        m.singular_time = T;
        out.v = march(m);
    }
    out.v.label = "v";
    out.v.trunc_level = kUntruncated;
    return out;
}

RecursionState solve_regime4(const GridSpec1D& spec, double ell, double delta, double b,
                             std::optional<int> n_switches, double K, const PdeOptions& opts) {
    check_sizes(spec);
    if (!(b > 0.0)) throw DomainError("regime 4 needs b > 0");
    if (n_switches && *n_switches < 1) throw DomainError("regime 4 needs n_switches >= 1");
    const double T = spec.t.back();
    const std::size_t i_ell = index_of(spec.x, ell, "ell");
    const std::size_t i_b = index_of(spec.x, ell + b, "ell + b");
    if (i_b <= i_ell) throw DomainError("b is below the grid resolution");
    const std::size_t jd = time_index_of(spec.t, T - delta);
    if (jd == 0) throw DomainError("regime 4 needs delta < T");

    const auto x1 = sub_axis(spec.x, i_ell, spec.x.size() - 1);
    const auto x0 = sub_axis(spec.x, 0, i_b);
    const auto head_t = sub_axis(spec.t, 0, jd);
    const std::size_t ib_in_x1 = i_b - i_ell;
    const std::size_t nh = head_t.size();

    RecursionState st;
    auto r2 = solve_regime2({spec.t, x1}, K, opts);
    st.certificate = r2.certificate;
    st.u_inf = slice_time(r2.grid, jd, spec.t.size() - 1);
    st.u_inf.label = "u_inf";

    // u_{1,n}: slab on [T - delta, T] shared, march on [0, T - delta] with the
    // lateral value at ell supplied by u_{0,n-1}.
    auto build_u1 = [&](const std::function<double(std::size_t)>& lateral, int n) {
        MarchProblem m;
        m.t = &head_t;
        m.x = &x1;
        m.terminal.assign(st.u_inf.level(0).begin(), st.u_inf.level(0).end());
        m.left = {true, lateral};
        m.opts = &opts;
        m.singular_time = T;
        Grid1D head = march(m);
        Grid1D full = stack_time(head, st.u_inf);
        full.label = "u1_" + std::to_string(n);
        return full;
    };
    auto build_u0 = [&](const Grid1D& u1, int n) {
        MarchProblem m;
        m.t = &head_t;
        m.x = &x0;
        m.terminal.assign(x0.size(), -K);
        m.right = {true, [&u1, ib_in_x1](std::size_t j) { return u1(j, ib_in_x1); }};
        m.opts = &opts;
        m.linear = true;
        Grid1D g = march(m);
        g.label = "u0_" + std::to_string(n);
        g.trunc_level = kUntruncated;
        return g;
    };

    const int cap = n_switches ? *n_switches : 200;
    for (int n = 1; n <= cap; ++n) {
        std::function<double(std::size_t)> lateral;
        if (n == 1) {
            lateral = [K](std::size_t) { return -K; };
        } else {
            const Grid1D& prev0 = st.u0.back();
            lateral = [&prev0, i_ell](std::size_t j) { return prev0(j, i_ell); };
        }
        st.u1.push_back(build_u1(lateral, n));
        st.u0.push_back(build_u0(st.u1.back(), n));
        st.n = n;
        if (n >= 2) {
            const Grid1D& a = st.u1[n - 2];
            const Grid1D& c = st.u1[n - 1];
            double sup = 0.0;
            for (std::size_t j = 0; j < nh; ++j)
                for (std::size_t i = 0; i < c.nx(); ++i) sup = std::max(sup, std::abs(c(j, i) - a(j, i)));
            st.sup_changes.push_back(sup);
            if (!n_switches && sup < opts.tol) break;
        }
    }
    return st;
}

}  // namespace minliq
