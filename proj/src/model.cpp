#include "minliq/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "minliq/errors.hpp"

namespace minliq {

std::string to_string(RegimeKind kind) {
    switch (kind) {
        case RegimeKind::FullLiquidation: return "R0";
        case RegimeKind::TerminalThreshold: return "R1";
        case RegimeKind::StopAtHit: return "R2";
        case RegimeKind::PauseBelow: return "R3";
        case RegimeKind::PauseWithBuffer: return "R4";
    }
    return "?";
}

RegimeKind regime_kind_from_string(const std::string& name) {
    if (name == "R0" || name == "full_liquidation") return RegimeKind::FullLiquidation;
    if (name == "R1" || name == "terminal_threshold") return RegimeKind::TerminalThreshold;
    if (name == "R2" || name == "stop_at_hit") return RegimeKind::StopAtHit;
    if (name == "R3" || name == "pause_below") return RegimeKind::PauseBelow;
    if (name == "R4" || name == "pause_with_buffer") return RegimeKind::PauseWithBuffer;
    throw DomainError("unknown regime kind '" + name + "'");
}

bool ValidationReport::ok() const { return first_failure() == nullptr; }

const Condition* ValidationReport::first_failure() const {
    for (const auto& c : conditions)
        if (!c.passed) return &c;
    return nullptr;
}

double vol_bar(const ModelParams& params) {
    return (params.p_hat - 1.0) * params.V / std::pow(params.eta, params.p() - 1.0);
}

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

bool all_finite(const ModelParams& m) {
    for (double x : {m.p_hat, m.k, m.eta, m.V, m.sigma, m.S0, m.T, m.q0})
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

ValidationReport assess(const ModelParams& params, const std::optional<SVParams>& sv,
                        const RegimeSpec& regime) {
    ValidationReport report;
    if (!all_finite(params)) {
        report.conditions.push_back({"finite parameters", 1.0, 0.0, false, "non-finite model field"});
        return report;
    }

    auto add = [&](std::string name, double lhs, double rhs, bool strict_less, std::string detail) {
        const bool ok = strict_less ? lhs < rhs : lhs <= rhs;
        report.conditions.push_back({std::move(name), lhs, rhs, ok, std::move(detail)});
    };

    add("p_hat > 1", 1.0, params.p_hat, true, "p_hat = " + fmt(params.p_hat));
    add("positive market parameters",
        -std::min({params.eta, params.V, params.sigma, params.S0, params.T, params.q0}), 0.0, true,
        "eta, V, sigma, S0, T, q0 must be > 0");
    add("k >= 0", -params.k, 0.0, false, "k = " + fmt(params.k));
    if (!report.ok()) return report;

    // K^(p-1) (p-1) T vol_bar < 1 keeps the lower bound z finite on [0, T].
    const double p = params.p();
    const double K = params.K();
    const double lhs = std::pow(K, p - 1.0) * (p - 1.0) * params.T * vol_bar(params);
    add("K^(p-1)(p-1)T*vol_bar < 1", lhs, 1.0, true,
        "K = " + fmt(K) + ", vol_bar = " + fmt(vol_bar(params)));

    if (sv) {
        add("Feller 2*alpha*theta > c^2", sv->c * sv->c, 2.0 * sv->alpha * sv->theta, true,
            "alpha = " + fmt(sv->alpha) + ", theta = " + fmt(sv->theta) + ", c = " + fmt(sv->c));
        add("|rho| <= 1", std::abs(sv->rho), 1.0, false, "rho = " + fmt(sv->rho));
        add("nu0 > 0", -sv->nu0, 0.0, true, "nu0 = " + fmt(sv->nu0));
    }

    if (!std::isfinite(regime.ell))
        report.conditions.push_back({"finite ell", 1.0, 0.0, false, "ell is not finite"});
    if (regime.kind == RegimeKind::PauseBelow || regime.kind == RegimeKind::PauseWithBuffer) {
        add("delta < T", regime.delta, params.T, true, "delta = " + fmt(regime.delta));
        add("delta > 0", -regime.delta, 0.0, true, "delta = " + fmt(regime.delta));
    }
    if (regime.kind == RegimeKind::PauseWithBuffer) {
        add("b > 0", -regime.b, 0.0, true, "b = " + fmt(regime.b));
        if (regime.n_switches)
            add("n_switches >= 1", 1.0, static_cast<double>(*regime.n_switches), false,
                "n_switches = " + std::to_string(*regime.n_switches));
    }
    return report;
}

ValidationReport validate(const ModelParams& params, const std::optional<SVParams>& sv,
                          const RegimeSpec& regime) {
    auto report = assess(params, sv, regime);
    if (const auto* bad = report.first_failure())
        throw AssumptionViolated(bad->name, "lhs = " + fmt(bad->lhs) + ", rhs = " + fmt(bad->rhs) +
                                                "; " + bad->detail);
    return report;
}

double lower_bound_z(double K, double p, double vol_bar, double T, double t) {
    if (K == 0.0) return 0.0;
    const double bracket = std::pow(K, 1.0 - p) - (p - 1.0) * vol_bar * (T - t);
    if (!(bracket > 0.0))
        throw AssumptionViolated("K^(p-1)(p-1)T*vol_bar < 1",
                                 "lower bound explodes at t = " + fmt(t));
    return -std::pow(bracket, -1.0 / (p - 1.0));
}

double lower_bound_z(const ModelParams& params, double vol_bar, double t) {
    return lower_bound_z(params.K(), params.p(), vol_bar, params.T, t);
}

double integrate_simpson(const std::function<double(double)>& f, double a, double b,
                         double rel_tol) {
    if (a == b) return 0.0;
    auto composite = [&](int n) {
        const double h = (b - a) / n;
        double s = f(a) + f(b);
        for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
        return s * h / 3.0;
    };
    int n = 16;
    double prev = composite(n);
    for (int iter = 0; iter < 20; ++iter) {
        n *= 2;
        const double cur = composite(n);
        if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), 1e-300)) return cur;
        prev = cur;
    }
    return prev;
}

double lower_bound_z(double K, double p, const std::function<double(double)>& vol, double T,
                     double t) {
    if (K == 0.0) return 0.0;
    const double integral = integrate_simpson(vol, t, T);
    const double bracket = std::pow(K, 1.0 - p) - (p - 1.0) * integral;
    if (!(bracket > 0.0))
        throw AssumptionViolated("K^(p-1)(p-1)int vol < 1", "lower bound explodes at t = " + fmt(t));
    return -std::pow(bracket, -1.0 / (p - 1.0));
}

double analytic_blowup_profile(double p, double vol_const, double T, double t) {
    if (!(t < T)) throw DomainError("blow-up profile is infinite for t >= T");
    if (!(vol_const > 0.0)) throw DomainError("blow-up profile needs vol > 0");
    return std::pow((p - 1.0) * vol_const * (T - t), -1.0 / (p - 1.0));
}

double analytic_blowup_profile(const ModelParams& params, double vol_const, double t) {
    return analytic_blowup_profile(params.p(), vol_const, params.T, t);
}

CanonicalParams to_canonical(const ModelParams& params, const RegimeSpec& regime) {
    if (std::abs(params.p_hat - 2.0) > 1e-12) throw UnsupportedExponent(params.p_hat);
    CanonicalParams c;
    c.K_c = params.k * params.V / (2.0 * params.eta);
    c.coef_A1 = -params.k * params.q0 / (2.0 * params.S0);
    c.coef_A2 = params.sigma / params.S0;
    c.coef_A3 = params.eta * params.q0 / (params.V * params.S0);
    c.ell_c = regime.ell;
    c.T = params.T;
    return c;
}

BaselineQuantities baseline_is_quantities(double T) {
    if (!(T > 0.0)) throw DomainError("T must be positive");
    return {1.0 / T, T / 3.0};
}

}  // namespace minliq
