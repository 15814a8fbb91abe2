#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace minliq {

// Market, impact and cost parameters of the liquidation problem.
//
// Execution cost L(rho) = eta |rho|^p_hat, permanent impact
// kappa(q', q) = k |q|^(p_hat-2) q'. The Hoelder conjugate p of p_hat and the
// terminal penalty K = k / p_hat are derived, never stored.
struct ModelParams {
    double p_hat = 2.0;
    double k = 1e-7;
    double eta = 0.3;
    double V = 4e6;
    double sigma = 0.6;
    double S0 = 45.0;
    double T = 1.0;
    double q0 = 1e5;

    double p() const { return p_hat / (p_hat - 1.0); }
    double K() const { return k / p_hat; }
};

// Heston-type variance dynamics d nu = alpha (theta - nu) dt + c sqrt(nu) dW2.
struct SVParams {
    double alpha = 1.0;
    double theta = 1.0;
    double c = 0.1;
    double rho = 0.0;
    double nu0 = 1.0;

    bool feller() const { return 2.0 * alpha * theta > c * c; }
};

enum class RegimeKind {
    FullLiquidation,     // R0: trade always, close always
    TerminalThreshold,   // R1: trade always, close iff W_T >= ell
    StopAtHit,           // R2: stop for good at the first passage below ell
    PauseBelow,          // R3: trade only above ell, end buffer delta
    PauseWithBuffer,     // R4: pause below ell, resume above ell + b
};

std::string to_string(RegimeKind kind);
RegimeKind regime_kind_from_string(const std::string& name);

// Thresholds ell and b are expressed in units of sigma.
struct RegimeSpec {
    RegimeKind kind = RegimeKind::TerminalThreshold;
    double ell = -1.4;
    double delta = 0.0;
    double b = 0.0;
    std::optional<int> n_switches;  // nullopt = unbounded
};

struct Condition {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool passed = false;
    std::string detail;

    double margin() const { return rhs - lhs; }
};

struct ValidationReport {
    std::vector<Condition> conditions;

    bool ok() const;
    const Condition* first_failure() const;
};

// Constant bound on the restricted volume, (p_hat - 1) V / eta^(p-1).
double vol_bar(const ModelParams& params);

// Evaluates every condition without throwing.
ValidationReport assess(const ModelParams& params, const std::optional<SVParams>& sv,
                        const RegimeSpec& regime);

// Same as assess() but throws AssumptionViolated naming the first failure.
ValidationReport validate(const ModelParams& params, const std::optional<SVParams>& sv,
                          const RegimeSpec& regime);

// Deterministic lower bound z_t for constant vol_bar:
//   z_t = -(K^(1-p) - (p-1) vol_bar (T-t))^(-1/(p-1)),  z_T = -K.
double lower_bound_z(double K, double p, double vol_bar, double T, double t);
double lower_bound_z(const ModelParams& params, double vol_bar, double t);

// Lower bound for a deterministic time-dependent vol; the integral of vol over
// [t, T] is computed by composite Simpson refined to 1e-10 relative change.
double lower_bound_z(double K, double p, const std::function<double(double)>& vol, double T,
                     double t);

double integrate_simpson(const std::function<double(double)>& f, double a, double b,
                         double rel_tol = 1e-10);

// Solution of y' = vol |y|^p with y_T = +inf:  ((p-1) vol (T-t))^(-1/(p-1)).
double analytic_blowup_profile(double p, double vol_const, double T, double t);
double analytic_blowup_profile(const ModelParams& params, double vol_const, double t);

// Quadratic-cost problem with sigma, eta and V factored out.
struct CanonicalParams {
    double K_c = 0.0;      // k V / (2 eta)
    double coef_A1 = 0.0;  // -k q0 / (2 S0)
    double coef_A2 = 0.0;  // sigma / S0
    double coef_A3 = 0.0;  // eta q0 / (V S0)
    double ell_c = 0.0;
    double T = 1.0;
};

CanonicalParams to_canonical(const ModelParams& params, const RegimeSpec& regime);

struct BaselineQuantities {
    double A3S = 0.0;
    double varA2S = 0.0;
};

// Transaction-cost term and noise variance of the uniform-speed liquidation.
BaselineQuantities baseline_is_quantities(double T);

}  // namespace minliq
