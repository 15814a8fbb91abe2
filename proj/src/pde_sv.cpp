#include "minliq/pde_sv.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "minliq/errors.hpp"
#include "minliq/reaction.hpp"

namespace minliq {

double sv_nu_max(const SVParams& sv) {
    return sv.theta + 8.0 * sv.c * std::sqrt(sv.theta / (2.0 * sv.alpha));
}

std::vector<double> sv_nu_axis(const SVParams& sv, int n_nu) {
    if (n_nu < 3) throw DomainError("variance axis needs at least 3 nodes");
    if (!(sv.nu0 > 0.0)) throw DomainError("nu0 must be positive");
    const double top = std::max(sv_nu_max(sv), 1.05 * sv.nu0);
    const double dnu = top / n_nu;
    // nodes nu0 + i dnu, kept strictly positive and at most one cell above top
    const long lo = static_cast<long>(std::ceil((dnu * 0.5 - sv.nu0) / dnu));
    std::vector<double> axis;
    for (long i = lo; static_cast<int>(axis.size()) < n_nu; ++i) axis.push_back(sv.nu0 + i * dnu);
    return axis;
}

namespace {

struct RowCoef {
    double dss = 0.0;  // 1/2 nu / ds^2
    double dnn = 0.0;  // 1/2 nu c^2 / dnu^2, zero on the edge rows
    double up = 0.0;   // drift weight toward nu + dnu
    double dn = 0.0;   // drift weight toward nu - dnu
    double mix = 0.0;  // c nu rho / (4 dnu ds), zero on the edge rows
};

std::vector<RowCoef> row_coefficients(const SVGridSpec& spec, const SVParams& sv) {
    const std::size_t nn = spec.nu.size();
    const double dnu = spec.nu[1] - spec.nu[0];
    const double ds = spec.s[1] - spec.s[0];
    std::vector<RowCoef> rows(nn);
    for (std::size_t a = 0; a < nn; ++a) {
        const double nu = spec.nu[a];
        RowCoef& r = rows[a];
        r.dss = 0.5 * nu / (ds * ds);
        const bool edge = a == 0 || a + 1 == nn;
        if (!edge) {
            r.dnn = 0.5 * nu * sv.c * sv.c / (dnu * dnu);
            r.mix = sv.c * nu * sv.rho / (4.0 * dnu * ds);
        }
        const double b = sv.alpha * (sv.theta - nu);
        if (a == 0) {
            r.up = b / dnu;  // forward difference, either sign
        } else if (a + 1 == nn) {
            r.dn = -b / dnu;  // backward difference, either sign
        } else if (b > 0.0) {
            r.up = b / dnu;
        } else {
            r.dn = -b / dnu;
        }
    }
    return rows;
}

class SVMarcher {
public:
    SVMarcher(const SVGridSpec& spec, const SVParams& sv, const SVOptions& opts)
        : spec_(spec), opts_(opts), rows_(row_coefficients(spec, sv)), nn_(spec.nu.size()), ns_(spec.s.size()) {
        double rate = 0.0;
        for (const auto& r : rows_)
            rate = std::max(rate, 2.0 * r.dss + 2.0 * r.dnn + std::abs(r.up) + std::abs(r.dn) + 4.0 * std::abs(r.mix));
        dt_max_ = rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
    }

    double dt_max() const { return dt_max_; }

    Grid2D run(const std::vector<double>& terminal_s, double trunc_n) {
        const auto& t = spec_.t;
        const std::size_t nt = t.size();
        const std::size_t plane = nn_ * ns_;
        Grid2D g;
        g.t = t;
        g.nu = spec_.nu;
        g.s = spec_.s;
        g.values.resize(nt * plane);
        g.trunc_level = trunc_n;

        std::vector<double> u(plane), next(plane);
        for (std::size_t a = 0; a < nn_; ++a)
            std::copy(terminal_s.begin(), terminal_s.end(), u.begin() + static_cast<std::ptrdiff_t>(a * ns_));
        std::copy(u.begin(), u.end(), g.values.begin() + static_cast<std::ptrdiff_t>((nt - 1) * plane));

        const double step_cap = opts_.cfl * dt_max_;
        for (std::size_t j = nt - 1; j-- > 0;) {
            const double span = t[j + 1] - t[j];
            const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(span / step_cap - 1e-12)));
            const std::size_t steps = std::max(m, static_cast<std::size_t>(opts_.substeps));
            const double h = span / static_cast<double>(steps);
            for (std::size_t k = 0; k < steps; ++k) {
                const double tm = t[j + 1] - (static_cast<double>(k) + 0.5) * h;
                react_all(u, tm, 0.5 * h);
                apply(u, next, h);
                u.swap(next);
                react_all(u, tm, 0.5 * h);
            }
            for (std::size_t n = 0; n < plane; ++n) {
                if (!std::isfinite(u[n])) {
                    std::ostringstream os;
                    os << "non-finite value at t = " << t[j] << " (explicit step " << h << ")";
                    throw InstabilityDetected(os.str());
                }
            }
            std::copy(u.begin(), u.end(), g.values.begin() + static_cast<std::ptrdiff_t>(j * plane));
        }
        return g;
    }

private:
    void react_all(std::vector<double>& u, double tm, double h) const {
        for (std::size_t a = 0; a < nn_; ++a) {
            for (std::size_t i = 0; i < ns_; ++i) {
                const double vol = opts_.vol ? opts_.vol(tm, spec_.nu[a], spec_.s[i]) : opts_.vol_bar;
                double& v = u[a * ns_ + i];
                v = react(v, vol, h, opts_.p);
            }
        }
    }

    // next = u + h L u
    void apply(const std::vector<double>& u, std::vector<double>& next, double h) const {
        auto at = [&](std::size_t a, std::size_t i) { return u[a * ns_ + i]; };
        for (std::size_t a = 0; a < nn_; ++a) {
            const RowCoef& r = rows_[a];
            for (std::size_t i = 0; i < ns_; ++i) {
                const double c = at(a, i);
                double lu = 0.0;
                if (i > 0 && i + 1 < ns_) {
                    lu += r.dss * (at(a, i + 1) - 2.0 * c + at(a, i - 1));
                    if (r.mix != 0.0)
                        lu += r.mix * (at(a + 1, i + 1) - at(a + 1, i - 1) - at(a - 1, i + 1) + at(a - 1, i - 1));
                }
                if (r.dnn != 0.0) lu += r.dnn * (at(a + 1, i) - 2.0 * c + at(a - 1, i));
                if (r.up != 0.0) lu += r.up * (at(a + 1, i) - c);
                if (r.dn != 0.0) lu += r.dn * (at(a - 1, i) - c);
                next[a * ns_ + i] = c + h * lu;
            }
        }
    }

    const SVGridSpec& spec_;
    const SVOptions& opts_;
    std::vector<RowCoef> rows_;
    std::size_t nn_;
    std::size_t ns_;
    double dt_max_ = 0.0;
};

void check_spec(const SVGridSpec& spec, const SVParams& sv) {
    if (spec.t.size() < 2 || spec.nu.size() < 3 || spec.s.size() < 3) throw DomainError("grid too small");
    if (!(spec.nu.front() > 0.0)) throw DomainError("variance axis must stay above zero");
    for (std::size_t j = 1; j < spec.t.size(); ++j)
        if (!(spec.t[j] > spec.t[j - 1])) throw DomainError("time axis must be increasing");
    if (!sv.feller())
        throw AssumptionViolated("Feller 2*alpha*theta > c^2", "variance process can reach zero");
    if (std::abs(sv.rho) > 1.0) throw AssumptionViolated("|rho| <= 1", "correlation out of range");
}

}  // namespace

double sv_stable_dt(const SVGridSpec& spec, const SVParams& sv) {
    SVOptions opts;
    return SVMarcher(spec, sv, opts).dt_max();
}

Grid2D solve_sv_truncated(const SVGridSpec& spec, const SVParams& sv, const TerminalSpec& terminal,
                          double trunc_n, const SVOptions& opts) {
    check_spec(spec, sv);
    if (!(opts.cfl > 0.0 && opts.cfl <= 1.0))
        throw InstabilityDetected("cfl factor must lie in (0, 1]");
    if (opts.substeps < 1) throw DomainError("substeps must be at least 1");
    SVMarcher marcher(spec, sv, opts);
    auto g = marcher.run(terminal.evaluate(spec.s, trunc_n), trunc_n);
    g.label = "u_sv";
    return g;
}

SVSolution solve_sv(const SVGridSpec& spec, const SVParams& sv, const TerminalSpec& terminal,
                    const SVOptions& opts) {
    check_spec(spec, sv);
    SVSolution out;
    if (!terminal.singular()) {
        out.grid = solve_sv_truncated(spec, sv, terminal, kUntruncated, opts);
        out.certificate.converged = true;
        return out;
    }
    if (opts.trunc_schedule.empty()) throw DomainError("empty truncation schedule");
    const double t_limit = spec.t.back() - opts.t_cut;
    auto& cert = out.certificate;
    std::optional<Grid2D> prev;
    for (double n : opts.trunc_schedule) {
        Grid2D cur = solve_sv_truncated(spec, sv, terminal, n, opts);
        cert.levels.push_back(n);
        if (prev) {
            double delta = 0.0;
            double min_inc = std::numeric_limits<double>::infinity();
            const std::size_t plane = cur.plane();
            for (std::size_t j = 0; j < cur.t.size(); ++j) {
                for (std::size_t q = 0; q < plane; ++q) {
                    const double a = prev->values[j * plane + q];
                    const double b = cur.values[j * plane + q];
                    min_inc = std::min(min_inc, (b - a) / std::max(opts.value_scale, std::abs(a)));
                    if (cur.t[j] <= t_limit)
                        delta = std::max(delta, std::abs(b - a) / std::max(opts.value_scale, std::abs(b)));
                }
            }
            cert.deltas.push_back(delta);
            cert.min_increments.push_back(min_inc);
            if (min_inc < -1e-12) cert.monotone = false;
            if (delta < opts.tol) {
                cert.converged = true;
                out.grid = std::move(cur);
                out.grid.trunc_level = kUntruncated;
                return out;
            }
        }
        prev = std::move(cur);
    }
    if (cert.levels.size() == 1) {
        cert.converged = true;
        out.grid = std::move(*prev);
        return out;
    }
    std::ostringstream os;
    os << "last relative change " << cert.deltas.back() << " >= tol " << opts.tol;
    throw NoConvergence(cert.deltas.back(), os.str());
}

}  // namespace minliq
