#include <cmath>
#include <random>

#include "doctest.h"
#include "minliq/control.hpp"
#include "minliq/errors.hpp"
#include "minliq/model.hpp"

using namespace minliq;

TEST_SUITE("model") {

TEST_CASE("reference parameters satisfy every condition") {
    const ModelParams p;
    const ValidationReport r = assess(p, std::nullopt, RegimeSpec{});
    CHECK(r.ok());
    CHECK(r.first_failure() == nullptr);
    CHECK(vol_bar(p) == doctest::Approx(4e6 / 0.3));
    CHECK(to_canonical(p, RegimeSpec{}).K_c == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("violated lower bound names the inequality") {
    ModelParams p;
    p.eta = 0.1;
    p.k = 2e-7;
    const ValidationReport r = assess(p, std::nullopt, RegimeSpec{});
    REQUIRE(r.first_failure() != nullptr);
    CHECK(r.first_failure()->name == "K^(p-1)(p-1)T*vol_bar < 1");
    CHECK(r.first_failure()->lhs == doctest::Approx(4.0));
    try {
        validate(p, std::nullopt, RegimeSpec{});
        FAIL("expected AssumptionViolated");
    } catch (const AssumptionViolated& e) {
        CHECK(e.which() == "K^(p-1)(p-1)T*vol_bar < 1");
    }
}

TEST_CASE("zero permanent impact passes trivially") {
    ModelParams p;
    p.k = 0.0;
    CHECK(assess(p, std::nullopt, RegimeSpec{}).ok());
    CHECK(lower_bound_z(p, vol_bar(p), 0.3) == 0.0);
}

TEST_CASE("Feller failure is reported") {
    SVParams sv;
    sv.alpha = 0.1;
    sv.theta = 0.1;
    sv.c = 1.0;
    const ValidationReport r = assess(ModelParams{}, sv, RegimeSpec{});
    REQUIRE(r.first_failure() != nullptr);
    CHECK(r.first_failure()->name == "Feller 2*alpha*theta > c^2");
}

TEST_CASE("lower bound z in canonical units") {
    const double K = 2.0 / 3.0;
    CHECK(lower_bound_z(K, 2.0, 1.0, 1.0, 0.0) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(lower_bound_z(K, 2.0, 1.0, 1.0, 0.5) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(lower_bound_z(K, 2.0, 1.0, 1.0, 1.0) == doctest::Approx(-K).epsilon(1e-14));
}

TEST_CASE("z solves z' = vol |z|^p") {
    const double K = 0.4, p = 1.7, vb = 1.3, T = 1.0;
    for (double t : {0.1, 0.4, 0.8}) {
        const double h = 1e-5;
        const double dz = (lower_bound_z(K, p, vb, T, t + h) - lower_bound_z(K, p, vb, T, t - h)) / (2 * h);
        const double z = lower_bound_z(K, p, vb, T, t);
        CHECK(dz == doctest::Approx(vb * std::pow(std::abs(z), p)).epsilon(1e-6));
        CHECK(lower_bound_z(K, p, vb, T, t + 0.05) > z);
    }
}

TEST_CASE("time-dependent vol reduces to the constant formula") {
    const double z1 = lower_bound_z(0.5, 2.0, [](double) { return 1.2; }, 1.0, 0.2);
    CHECK(z1 == doctest::Approx(lower_bound_z(0.5, 2.0, 1.2, 1.0, 0.2)).epsilon(1e-10));
    CHECK(integrate_simpson([](double s) { return std::sin(s); }, 0.0, M_PI) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("blow-up profile") {
    CHECK(analytic_blowup_profile(2.0, 1.0, 1.0, 0.0) == doctest::Approx(1.0));
    CHECK(analytic_blowup_profile(2.0, 1.0, 1.0, 0.95) == doctest::Approx(20.0));
    CHECK(analytic_blowup_profile(3.0, 1.0, 1.0, 0.0) == doctest::Approx(std::sqrt(0.5)));
    CHECK_THROWS_AS(analytic_blowup_profile(2.0, 1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("Hoelder conjugate") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(1.01, 10.0);
    for (int i = 0; i < 100; ++i) {
        ModelParams p;
        p.p_hat = u(rng);
        CHECK(1.0 / p.p_hat + 1.0 / p.p() == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("canonical coefficients") {
    const ModelParams p;
    const CanonicalParams c = to_canonical(p, RegimeSpec{});
    CHECK(c.coef_A1 == doctest::Approx(-1e-7 * 1e5 / 90.0));
    CHECK(c.coef_A2 == doctest::Approx(0.6 / 45.0));
    CHECK(c.coef_A3 == doctest::Approx(0.3e5 / (4e6 * 45.0)));
    CHECK(c.ell_c == -1.4);
    ModelParams q = p;
    q.p_hat = 3.0;
    CHECK_THROWS_AS(to_canonical(q, RegimeSpec{}), UnsupportedExponent);
}

TEST_CASE("canonical form is invariant under joint scaling") {
    const ModelParams a;
    ModelParams b = a;
    b.sigma *= 2.0;
    b.S0 *= 2.0;
    b.k *= 2.0;
    b.eta *= 2.0;
    const CanonicalParams ca = to_canonical(a, RegimeSpec{}), cb = to_canonical(b, RegimeSpec{});
    CHECK(ca.K_c == cb.K_c);
    CHECK(ca.coef_A1 == cb.coef_A1);
    CHECK(ca.coef_A2 == cb.coef_A2);
    CHECK(ca.coef_A3 == cb.coef_A3);
}

TEST_CASE("baseline quantities") {
    CHECK(baseline_is_quantities(1.0).A3S == doctest::Approx(1.0));
    CHECK(baseline_is_quantities(1.0).varA2S == doctest::Approx(1.0 / 3.0));
    CHECK(baseline_is_quantities(4.0).A3S == doctest::Approx(0.25));
}

TEST_CASE("regime names") {
    CHECK(regime_kind_from_string("R3") == RegimeKind::PauseBelow);
    CHECK(regime_kind_from_string("stop_at_hit") == RegimeKind::StopAtHit);
    CHECK(regime_kind_from_string(to_string(RegimeKind::PauseWithBuffer)) == RegimeKind::PauseWithBuffer);
    CHECK_THROWS(regime_kind_from_string("R9"));
}

TEST_CASE("optimal rate") {
    CHECK(optimal_rate_1d(0.0, 1.0, 2.0, 1.0) == 0.0);
    CHECK(optimal_rate_1d(2.0, 0.5, 2.0, 1.0) == doctest::Approx(-1.0));
    CHECK(optimal_rate_sv(8.0, 1.0, 1.5, 1.0) == doctest::Approx(-0.5 * std::sqrt(8.0)));
    CHECK(optimal_rate_sv(-1.0, 1.0, 2.0, 1.0) > 0.0);
}

}
