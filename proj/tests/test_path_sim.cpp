#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "minliq/errors.hpp"
#include "minliq/model.hpp"
#include "minliq/path_sim.hpp"
#include "minliq/regime.hpp"
#include "minliq/stats.hpp"

using namespace minliq;

namespace {

RegimeSpec spec_of(RegimeKind k, double ell = -1.4) {
    RegimeSpec r;
    r.kind = k;
    r.ell = ell;
    return r;
}

// A path with prescribed values, in sigma units.
BrownianPath path_from(std::vector<double> w, double T = 1.0) {
    BrownianPath p;
    p.n_steps = static_cast<int>(w.size()) - 1;
    p.T = T;
    p.dt = T / p.n_steps;
    p.w = std::move(w);
    return p;
}

const RegimeSolution& r0_solution() {
    static const RegimeSolution s = solve_regime(ModelParams{}, spec_of(RegimeKind::FullLiquidation), SolverSettings{});
    return s;
}

const RegimeSolution& r2_solution() {
    static const RegimeSolution s = solve_regime(ModelParams{}, spec_of(RegimeKind::StopAtHit), SolverSettings{});
    return s;
}

}  // namespace

TEST_SUITE("path_sim") {

TEST_CASE("paths are deterministic in seed and index") {
    const BrownianPath a = gen_path(1, 5, 100, 1.0), b = gen_path(1, 5, 100, 1.0);
    const BrownianPath c = gen_path(1, 6, 100, 1.0), d = gen_path(2, 5, 100, 1.0);
    CHECK(a.w == b.w);
    CHECK(a.w != c.w);
    CHECK(a.w != d.w);
    CHECK(a.w.front() == 0.0);
    CHECK(a.w.size() == 101);
    CHECK_THROWS_AS(gen_path(1, 0, 99, 1.0), DomainError);
}

TEST_CASE("antithetic pairs") {
    const BrownianPath a = gen_path(3, 10, 100, 1.0, true), b = gen_path(3, 11, 100, 1.0, true);
    for (std::size_t k = 0; k < a.w.size(); ++k) CHECK(b.w[k] == -a.w[k]);
}

TEST_CASE("increments have Brownian moments") {
    std::vector<double> wT;
    for (std::size_t i = 0; i < 20000; ++i) wT.push_back(gen_path(11, i, 100, 2.0).w.back());
    const Moments m = moments(wT);
    CHECK(std::abs(m.mean) < 4.0 * std::sqrt(2.0 / 20000.0));
    CHECK(m.variance == doctest::Approx(2.0).epsilon(0.05));
    CHECK(std::abs(m.skew) < 0.1);
}

TEST_CASE("coarsening keeps every other point") {
    const BrownianPath a = gen_path(1, 0, 100, 1.0);
    const BrownianPath b = coarsen(a, 2);
    CHECK(b.n_steps == 50);
    CHECK(b.dt == doctest::Approx(0.02));
    for (std::size_t k = 0; k < b.w.size(); ++k) CHECK(b.w[k] == a.w[2 * k]);
}

TEST_CASE("threshold regime closes iff the endpoint is above ell") {
    const RegimeSpec r = spec_of(RegimeKind::TerminalThreshold);
    CHECK(trace_regime(path_from({0.0, -2.0, -1.0}), r).must_close);
    CHECK_FALSE(trace_regime(path_from({0.0, 1.0, -1.5}), r).must_close);
    CHECK(trace_regime(path_from({0.0, -2.0, -1.4}), r).must_close);
}

TEST_CASE("stop-at-hit freezes after the first passage") {
    const RegimeTrace t = trace_regime(path_from({0.0, -0.5, -1.5, 0.0, 0.5}), spec_of(RegimeKind::StopAtHit));
    REQUIRE(t.tau_ell.has_value());
    CHECK(*t.tau_ell == 2);
    CHECK(t.indicator[0] == 1);
    CHECK(t.indicator[1] == 1);
    CHECK(t.indicator[2] == 0);
    CHECK(t.indicator[3] == 0);
    CHECK_FALSE(t.must_close);
    const RegimeTrace above = trace_regime(path_from({0.0, 0.5, 1.0}), spec_of(RegimeKind::StopAtHit));
    CHECK_FALSE(above.tau_ell.has_value());
    CHECK(above.must_close);
}

TEST_CASE("pause with buffer resumes above ell + b") {
    RegimeSpec r = spec_of(RegimeKind::PauseWithBuffer, -1.0);
    r.delta = 0.2;
    r.b = 0.5;
    r.n_switches = 5;
    // 10 steps of 0.1; switch time 0.8 at index 8
    const BrownianPath p = path_from({0.0, -1.2, -0.8, -0.3, -1.1, -1.3, -0.4, -0.2, 0.0, 0.0, 0.0});
    const RegimeTrace t = trace_regime(p, r);
    const std::vector<std::uint8_t> expect{1, 0, 0, 1, 0, 0, 1, 1, 1, 1};
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(t.indicator[i] == expect[i]);
    CHECK(t.n_trades == 3);
    CHECK(t.must_close);
}

TEST_CASE("switch budget ends trading") {
    RegimeSpec r = spec_of(RegimeKind::PauseWithBuffer, -1.0);
    r.delta = 0.2;
    r.b = 0.5;
    r.n_switches = 1;
    const BrownianPath p = path_from({0.0, -1.2, -0.8, -0.3, -1.1, -1.3, -0.4, -0.2, 0.0, 0.0, 0.0});
    const RegimeTrace t = trace_regime(p, r);
    CHECK(t.n_trades == 1);
    for (std::size_t i = 1; i < 10; ++i) CHECK(t.indicator[i] == 0);
}

TEST_CASE("bridge correction is deterministic") {
    const BrownianPath p = gen_path(5, 3, 200, 1.0);
    TraceOptions o;
    o.bridge_correction = true;
    o.seed = 9;
    const RegimeSpec r = spec_of(RegimeKind::StopAtHit, -0.5);
    CHECK(trace_regime(p, r, o).tau_ell == trace_regime(p, r, o).tau_ell);
    const RegimeTrace plain = trace_regime(p, r);
    const RegimeTrace bridged = trace_regime(p, r, o);
    if (plain.tau_ell && bridged.tau_ell) CHECK(*bridged.tau_ell <= *plain.tau_ell);
}

TEST_CASE("full liquidation sells linearly") {
    const ModelParams params;
    const RegimeSolution& sol = r0_solution();
    const BrownianPath p = gen_path(1, 0, 2000, 1.0);
    const auto q = integrate_q(p, trace_regime(p, sol.regime), sol);
    for (std::size_t k = 0; k < q.size(); ++k) CHECK(q[k] == doctest::Approx(1.0 - k * p.dt).epsilon(1e-5));
    CHECK(q.back() == 0.0);
    const Decomposition d = decompose_A(p, q, params);
    CHECK(d.A1 == doctest::Approx(1.0));
    CHECK(d.A3 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("cash accounting agrees with the closed form") {
    const ModelParams params;
    const RegimeSolution& sol = r0_solution();
    const BrownianPath p = gen_path(1, 4, 4000, 1.0);
    const auto q = integrate_q(p, trace_regime(p, sol.regime), sol);
    const CashResult c = account_cash(p, q, params);
    CHECK(std::abs(c.XT - c.XT_closed) < 1e-3 * params.q0 * params.S0);
    const Decomposition d = decompose_A(p, q, params);
    CHECK(d.A == doctest::Approx(direct_A(c.XT, q.back(), params)).epsilon(1e-6));
}

TEST_CASE("flat price: cost of uniform selling") {
    ModelParams params;
    params.k = 0.0;
    params.sigma = 0.0;
    const RegimeSolution& sol = r0_solution();
    const BrownianPath p = path_from(std::vector<double>(2001, 0.0));
    const auto q = integrate_q(p, trace_regime(p, sol.regime), sol);
    const CashResult c = account_cash(p, q, params);
    const double expect = params.q0 * params.S0 - params.eta * params.q0 * params.q0 / (params.V * params.T);
    CHECK(c.XT == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("no trades") {
    const ModelParams params;
    const BrownianPath p = path_from({0.0, -2.0, -2.0, -2.0});
    CHECK_THROWS_AS(decompose_A(p, {1.0, 1.0, 1.0, 1.0}, params), NoTrades);
    const CashResult c = account_cash(p, {1.0, 1.0, 1.0, 1.0}, params);
    CHECK(c.XT == 0.0);
    CHECK(c.XT_closed == 0.0);
}

TEST_CASE("stop-at-hit keeps the position after the hit") {
    const RegimeSolution& sol = r2_solution();
    std::vector<double> w(2001);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = -3.0 * k / 2000.0;
    const BrownianPath p = path_from(w);
    const RegimeTrace t = trace_regime(p, sol.regime);
    const auto q = integrate_q(p, t, sol);
    REQUIRE(t.tau_ell.has_value());
    for (std::size_t k = *t.tau_ell; k < q.size(); ++k) CHECK(q[k] == q[*t.tau_ell]);
    CHECK(q.back() > kLiquidationEps);
    CHECK(q.back() < 1.0);
}

TEST_CASE("solution for a different horizon is rejected") {
    ModelParams params;
    params.T = 2.0;
    const BrownianPath p = gen_path(1, 0, 100, 2.0);
    CHECK_THROWS_AS(simulate_path(p, params, r0_solution(), BatchSettings{}), GridMismatch);
}

TEST_CASE("batches are reproducible and ordered") {
    const ModelParams params;
    BatchSettings b;
    b.n_paths = 50;
    b.n_steps = 500;
    b.dump_indices = {3};
    const auto a = run_batch(params, r2_solution(), b);
    const auto c = run_batch(params, r2_solution(), b);
    REQUIRE(a.size() == 50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].path_index == i);
        CHECK(a[i].fqT == c[i].fqT);
        CHECK(a[i].XT == c[i].XT);
    }
    CHECK(a[3].q_traj.size() == 501);
    CHECK(a[4].q_traj.empty());
    b.n_paths = 0;
    CHECK(run_batch(params, r2_solution(), b).empty());
}

TEST_CASE("liquidation flag") {
    const ModelParams params;
    BatchSettings b;
    b.n_paths = 30;
    b.n_steps = 500;
    for (const PathRecord& r : run_batch(params, r0_solution(), b)) {
        CHECK(r.liquidated);
        CHECK(r.fqT <= kLiquidationEps);
    }
}

}
