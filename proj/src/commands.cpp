#include "minliq/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "minliq/errors.hpp"
#include "minliq/io.hpp"
#include "minliq/path_sim.hpp"
#include "minliq/stats.hpp"

namespace minliq {

namespace {

using nlohmann::json;

std::string join_path(const std::string& dir, const std::string& name) { return dir + "/" + name; }

bool use_sv(const RunConfig& c) { return c.sv.has_value() || std::abs(c.model.p_hat - 2.0) > 1e-12; }

std::string grid_file(const std::string& label, const std::string& format) {
    return "grid_" + label + (format == "binary" ? ".bin" : ".csv");
}

void write_grid(const std::string& dir, const Grid1D& g, const std::string& format, json& files) {
    const std::string name = grid_file(g.label, format);
    if (format == "binary")
        write_grid_binary(join_path(dir, name), g);
    else
        write_grid_csv(join_path(dir, name), g);
    files.push_back(name);
}

Grid1D read_grid(const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".bin") return read_grid_binary(path);
    return read_grid_csv(path);
}

std::string short_double(double v) {
    std::ostringstream os;
    os << std::setprecision(8) << v;
    return os.str();
}

void print_report(const ValidationReport& report, std::ostream& out) {
    for (const auto& c : report.conditions) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << ": lhs = " << short_double(c.lhs)
            << ", rhs = " << short_double(c.rhs) << ", margin = " << short_double(c.margin());
        if (!c.detail.empty()) out << " (" << c.detail << ")";
        out << '\n';
    }
}

void write_cdf(const std::string& path, const CdfTable& t) {
    std::ostringstream os;
    os << "x,F\n";
    for (std::size_t i = 0; i < t.x.size(); ++i) os << format_double(t.x[i]) << ',' << format_double(t.F[i]) << '\n';
    write_text(path, os.str());
}

void write_conditional(const std::string& path, const RunSummary& s) {
    std::ostringstream os;
    os << "bucket,center,lo,hi,n,A2_mean,A2_sd,A2_skew,A2_exkurt,A3_mean,A3_sd\n";
    for (const auto& b : s.conditional) {
        os << b.bucket.index << ',' << format_double(b.bucket.center) << ',' << format_double(b.bucket.lo) << ','
           << format_double(b.bucket.hi) << ',' << b.A2.n << ',' << format_double(b.A2.mean) << ','
           << format_double(std::sqrt(b.A2.variance)) << ',' << format_double(b.A2.skew) << ','
           << format_double(b.A2.excess_kurtosis) << ',' << format_double(b.A3.mean) << ','
           << format_double(std::sqrt(b.A3.variance)) << '\n';
    }
    write_text(path, os.str());
}

void write_exp_tail(const std::string& path, const std::vector<PathRecord>& records) {
    std::vector<double> pos;
    for (const auto& r : records)
        if (!r.liquidated) pos.push_back(r.fqT);
    std::sort(pos.begin(), pos.end());
    double mean = 0.0;
    for (double v : pos) mean += v;
    mean = pos.empty() ? 0.0 : mean / static_cast<double>(pos.size());
    std::ostringstream os;
    os << "x,neg_log_survival,x_over_mean\n";
    const double n = static_cast<double>(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i)
        os << format_double(pos[i]) << ',' << format_double(-std::log((n - static_cast<double>(i)) / n)) << ','
           << format_double(pos[i] / mean) << '\n';
    write_text(path, os.str());
}

RunSummary analyze_into(const std::vector<PathRecord>& records, const std::optional<std::vector<PathRecord>>& baseline,
                        const std::string& out_dir) {
    ensure_directory(out_dir);
    RunSummary s = summarize(records);
    json j = summary_json(s);
    for (const auto& [name, table] : s.cdf_tables) write_cdf(join_path(out_dir, "cdf_" + name + ".csv"), table);
    write_conditional(join_path(out_dir, "conditional.csv"), s);
    write_exp_tail(join_path(out_dir, "exp_tail.csv"), records);
    for (const auto& b : s.conditional) {
        if (b.A2.n < 200) continue;
        std::vector<double> a2;
        for (const auto& r : records)
            if (!r.no_trades && bucket_of(r) == b.bucket.index) a2.push_back(r.A2);
        const QQTable q = qq_table(std::move(a2));
        std::ostringstream os;
        os << "normal,sample\n";
        for (std::size_t i = 0; i < q.sample.size(); ++i)
            os << format_double(q.normal[i]) << ',' << format_double(q.sample[i]) << '\n';
        write_text(join_path(out_dir, "qq_A2_bucket" + std::to_string(b.bucket.index) + ".csv"), os.str());
    }
    if (baseline) {
        const BaselineComparison c = compare_baseline(records, *baseline);
        std::ostringstream os;
        os << "statistic,mean,variance,baseline_mean,baseline_variance,diff_mean,diff_variance\n";
        json rows = json::array();
        for (const auto& r : c.rows) {
            os << r.name << ',' << format_double(r.mean) << ',' << format_double(r.variance) << ','
               << format_double(r.base_mean) << ',' << format_double(r.base_variance) << ','
               << format_double(r.mean - r.base_mean) << ',' << format_double(r.variance - r.base_variance) << '\n';
            rows.push_back({{"statistic", r.name}, {"mean", r.mean}, {"variance", r.variance},
                            {"baseline_mean", r.base_mean}, {"baseline_variance", r.base_variance}});
        }
        write_text(join_path(out_dir, "comparison.csv"), os.str());
        j["comparison"] = {{"rows", rows},
                           {"median_A3_liquidated", c.median_A3_liquidated ? json(*c.median_A3_liquidated) : json(nullptr)},
                           {"baseline_median_A3_liquidated",
                            c.base_median_A3_liquidated ? json(*c.base_median_A3_liquidated) : json(nullptr)}};
    }
    write_json(join_path(out_dir, "summary.json"), j);
    return s;
}

}  // namespace

std::string resolve_output_dir(const RunConfig& config, const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return *flag;
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return config.output.directory;
}

std::string config_hash(const RunConfig& config) { return sha256_hex(grid_identity(config)); }

int run_guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const AssumptionViolated& e) {
        err << "error: " << e.what() << '\n';
        return kExitAssumption;
    } catch (const NoConvergence& e) {
        err << "error: " << e.what() << '\n';
        return kExitNoConvergence;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

int cmd_check(const RunConfig& config, std::ostream& out) {
    const ValidationReport report = assess(config.model, config.sv, config.regime);
    print_report(report, out);
    if (std::abs(config.model.p_hat - 2.0) <= 1e-12) {
        const CanonicalParams cp = to_canonical(config.model, config.regime);
        out << "K_c = kV/(2 eta) = " << short_double(cp.K_c) << ", margin 1 - K_c T = "
            << short_double(1.0 - cp.K_c * config.model.T) << '\n';
    }
    if (const Condition* f = report.first_failure()) {
        out << "violated: " << f->name << '\n';
        return kExitAssumption;
    }
    return kExitOk;
}

SVSolution solve_sv_for_config(const RunConfig& c) {
    const SVParams sv = c.sv.value_or(SVParams{1.0, c.model.sigma * c.model.sigma, 0.1 * c.model.sigma, 0.0,
                                               c.model.sigma * c.model.sigma});
    SVGridSpec spec;
    spec.nu = sv_nu_axis(sv, c.sv_solver.n_nu);
    const double half = c.solver.half_width * std::sqrt(spec.nu.back() * c.model.T);
    const double ell = c.regime.ell * c.model.sigma;
    spec.s = anchored_axis(-half, half, 2.0 * half / (c.sv_solver.n_s - 1), {ell});
    spec.t = graded_time_axis(0.0, c.model.T, c.solver.nt, c.solver.grading);

    SVOptions o;
    o.p = c.model.p();
    o.vol_bar = vol_bar(c.model);
    if (c.sv_solver.vol == "inv_nu") {
        const double vb = o.vol_bar;
        o.vol = [vb](double, double nu, double) { return vb / (1.0 + nu); };
    } else if (c.sv_solver.vol != "constant") {
        throw DomainError("sv.vol must be constant or inv_nu");
    }
    o.trunc_schedule = c.solver.trunc_schedule;
    o.tol = c.solver.tol;
    o.t_cut = c.solver.t_cut;
    o.substeps = c.sv_solver.substeps;

    TerminalSpec term;
    switch (c.regime.kind) {
        case RegimeKind::FullLiquidation:
            term = TerminalSpec::all_singular();
            break;
        case RegimeKind::TerminalThreshold:
            term = TerminalSpec::threshold(ell, c.model.K());
            break;
        default:
            throw DomainError("the variance engine covers regimes R0 and R1 only");
    }
    // Truncation levels are given in canonical units; scale them to raw units.
    const double scale = std::pow(o.vol_bar, -1.0 / (o.p - 1.0));
    for (double& n : o.trunc_schedule) n *= scale;
    o.value_scale = scale;
    return solve_sv(spec, sv, term, o);
}

int cmd_solve(const RunConfig& config, const std::string& out_dir, std::ostream& out) {
    validate(config.model, config.sv, config.regime);
    ensure_directory(out_dir);
    const std::string format = config.output.format;
    json manifest;
    manifest["config_hash"] = config_hash(config);
    manifest["grid_identity"] = grid_identity(config);
    manifest["regime"] = to_string(config.regime.kind);
    manifest["format"] = format;
    json files = json::array();

    if (use_sv(config)) {
        SVSolution s = solve_sv_for_config(config);
        manifest["engine"] = "sv";
        const std::string name = std::string("grid_u_sv") + (format == "binary" ? ".bin" : ".csv");
        if (format == "binary")
            write_grid2d_binary(join_path(out_dir, name), s.grid);
        else
            write_grid2d_csv(join_path(out_dir, name), s.grid);
        files.push_back(name);
        manifest["certificate"] = certificate_json(s.certificate);
        out << "solved variance grid " << s.grid.t.size() << "x" << s.grid.nu.size() << "x" << s.grid.s.size() << '\n';
    } else {
        RegimeSolution s = solve_regime(config.model, config.regime, config.solver);
        manifest["engine"] = "1d";
        manifest["K_c"] = s.K_c;
        manifest["t_switch"] = s.t_switch;
        for (const auto& g : s.grids) write_grid(out_dir, g, format, files);
        json u0 = json::array();
        for (const auto& g : s.u0) write_grid(out_dir, g, format, u0);
        manifest["u0_files"] = u0;
        manifest["sup_changes"] = s.sup_changes;
        manifest["certificate"] = certificate_json(s.certificate);
        out << "solved " << s.grids.size() << " grid(s), K_c = " << format_double(s.K_c) << '\n';
    }
    manifest["files"] = files;
    const auto& cert = manifest["certificate"];
    out << "truncation levels:";
    for (const auto& l : cert["levels"]) out << ' ' << format_double(l.get<double>());
    out << "\nrelative changes:";
    for (const auto& d : cert["deltas"]) out << ' ' << format_double(d.get<double>());
    out << "\nmonotone: " << (cert["monotone"].get<bool>() ? "yes" : "no") << '\n';
    write_json(join_path(out_dir, "manifest.json"), manifest);
    return kExitOk;
}

RegimeSolution load_regime_solution(const RunConfig& config, const std::string& grid_dir) {
    const json manifest = read_json(join_path(grid_dir, "manifest.json"));
    if (manifest.value("config_hash", std::string()) != config_hash(config))
        throw GridMismatch("grid manifest in " + grid_dir + " was written for a different configuration");
    if (manifest.value("engine", std::string()) != "1d")
        throw GridMismatch("simulation needs one-dimensional grids");
    RegimeSolution s;
    s.regime = config.regime;
    s.T = config.model.T;
    s.K_c = manifest.at("K_c").get<double>();
    s.t_switch = manifest.at("t_switch").get<double>();
    for (const auto& f : manifest.at("files")) s.grids.push_back(read_grid(join_path(grid_dir, f.get<std::string>())));
    return s;
}

int cmd_simulate(const RunConfig& config, const std::string& grid_dir, const std::string& out_dir,
                 std::ostream& out) {
    validate(config.model, config.sv, config.regime);
    const RegimeSolution solution = load_regime_solution(config, grid_dir);
    const BatchSettings batch = batch_settings(config);
    const auto records = run_batch(config.model, solution, batch);
    ensure_directory(out_dir);
    write_records_csv(join_path(out_dir, "records.csv"), records);
    write_invariant_records_csv(join_path(out_dir, "records_fq_A.csv"), records);
    if (!batch.dump_indices.empty())
        write_trajectories_csv(join_path(out_dir, "trajectories.csv"), records, config.model.T);
    std::size_t liq = 0;
    for (const auto& r : records) liq += r.liquidated ? 1 : 0;
    out << "simulated " << records.size() << " paths, liquidated fraction "
        << format_double(records.empty() ? 0.0 : static_cast<double>(liq) / static_cast<double>(records.size()))
        << '\n';
    return kExitOk;
}

int cmd_analyze(const std::string& records_path, const std::optional<std::string>& baseline_path,
                const std::string& out_dir, std::ostream& out) {
    const auto records = read_records_csv(records_path);
    std::optional<std::vector<PathRecord>> baseline;
    if (baseline_path) baseline = read_records_csv(*baseline_path);
    const RunSummary s = analyze_into(records, baseline, out_dir);
    out << "P(liquidated) = " << format_double(s.p_liquidated) << " +- " << format_double(s.p_liquidated_se) << '\n';
    if (s.mean_fq_pos)
        out << "E[fq | fq > 0] = " << format_double(*s.mean_fq_pos) << ", sd = " << format_double(*s.sd_fq_pos)
            << '\n';
    if (s.exp_tail)
        out << "exponential tail: slope = " << format_double(s.exp_tail->slope)
            << ", r2 = " << format_double(s.exp_tail->r2) << ", slope * mean = " << format_double(s.exp_tail->ratio)
            << '\n';
    return kExitOk;
}

int cmd_sweep(const RunConfig& config, const std::string& axis, const std::vector<double>& values,
              const std::string& out_dir, std::ostream& out) {
    if (axis != "ell" && axis != "kV_over_eta") throw DomainError("sweep axis must be ell or kV_over_eta");
    if (values.empty()) throw DomainError("sweep needs at least one value");
    ensure_directory(out_dir);
    std::ostringstream csv;
    csv << "axis,value,n_paths,p_liquidated,p_liquidated_se,mean_fq_pos,sd_fq_pos,exp_tail_slope,exp_tail_r2,"
           "exp_tail_ratio\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        RunConfig c = config;
        if (axis == "ell")
            c.regime.ell = values[i];
        else
            c.model.k = values[i] * c.model.eta / c.model.V;
        const std::string point_dir = join_path(out_dir, "point_" + std::to_string(i));
        std::ostringstream sink;
        if (const int rc = cmd_solve(c, point_dir, sink); rc != kExitOk) return rc;
        if (const int rc = cmd_simulate(c, point_dir, point_dir, sink); rc != kExitOk) return rc;
        const auto records = read_records_csv(join_path(point_dir, "records.csv"));
        const RunSummary s = analyze_into(records, std::nullopt, point_dir);
        csv << axis << ',' << format_double(values[i]) << ',' << s.n_paths << ',' << format_double(s.p_liquidated)
            << ',' << format_double(s.p_liquidated_se) << ','
            << (s.mean_fq_pos ? format_double(*s.mean_fq_pos) : "nan") << ','
            << (s.sd_fq_pos ? format_double(*s.sd_fq_pos) : "nan") << ','
            << (s.exp_tail ? format_double(s.exp_tail->slope) : "nan") << ','
            << (s.exp_tail ? format_double(s.exp_tail->r2) : "nan") << ','
            << (s.exp_tail ? format_double(s.exp_tail->ratio) : "nan") << '\n';
        out << axis << " = " << format_double(values[i]) << ": P(liquidated) = " << format_double(s.p_liquidated)
            << '\n';
    }
    write_text(join_path(out_dir, "sweep.csv"), csv.str());
    return kExitOk;
}

}  // namespace minliq
