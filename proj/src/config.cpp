#include "minliq/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "minliq/errors.hpp"
#include "minliq/path_sim.hpp"

namespace minliq {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw DomainError("config: " + key + " expects a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long d = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw DomainError("config: " + key + " expects an integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, std::string v) {
    boost::algorithm::to_lower(v);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw DomainError("config: " + key + " expects a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, v, boost::algorithm::is_any_of(", "), boost::algorithm::token_compress_on);
    std::vector<std::string> out;
    for (auto& p : parts)
        if (!p.empty()) out.push_back(p);
    return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        if constexpr (std::is_floating_point_v<T>)
            s += num(v[i]);
        else
            s += std::to_string(v[i]);
    }
    return s;
}

void set_key(RunConfig& c, const std::string& section, const std::string& key, const std::string& raw) {
    const std::string v = boost::algorithm::trim_copy(raw);
    const std::string full = section + "." + key;
    auto d = [&] { return to_double(full, v); };
    auto i = [&] { return to_int(full, v); };

    if (section == "model") {
        ModelParams& m = c.model;
        if (key == "p_hat") m.p_hat = d();
        else if (key == "k") m.k = d();
        else if (key == "eta") m.eta = d();
        else if (key == "V") m.V = d();
        else if (key == "sigma") m.sigma = d();
        else if (key == "S0") m.S0 = d();
        else if (key == "T") m.T = d();
        else if (key == "q0") m.q0 = d();
        else throw DomainError("config: unknown key " + full);
    } else if (section == "sv") {
        if (!c.sv) c.sv = SVParams{};
        SVParams& s = *c.sv;
        if (key == "alpha") s.alpha = d();
        else if (key == "theta") s.theta = d();
        else if (key == "c") s.c = d();
        else if (key == "rho") s.rho = d();
        else if (key == "nu0") s.nu0 = d();
        else if (key == "n_nu") c.sv_solver.n_nu = static_cast<int>(i());
        else if (key == "n_s") c.sv_solver.n_s = static_cast<int>(i());
        else if (key == "substeps") c.sv_solver.substeps = static_cast<int>(i());
        else if (key == "vol") c.sv_solver.vol = v;
        else throw DomainError("config: unknown key " + full);
    } else if (section == "regime") {
        RegimeSpec& r = c.regime;
        if (key == "kind") r.kind = regime_kind_from_string(v);
        else if (key == "ell") r.ell = d();
        else if (key == "delta") r.delta = d();
        else if (key == "b") r.b = d();
        else if (key == "n_switches") {
            if (v == "unbounded" || v == "inf" || v.empty()) r.n_switches.reset();
            else r.n_switches = static_cast<int>(i());
        } else throw DomainError("config: unknown key " + full);
    } else if (section == "solver") {
        SolverSettings& s = c.solver;
        if (key == "dx") s.dx = d();
        else if (key == "half_width") s.half_width = d();
        else if (key == "nt") s.nt = static_cast<int>(i());
        else if (key == "grading") s.grading = d();
        else if (key == "t_cut") s.t_cut = d();
        else if (key == "tol") s.tol = d();
        else if (key == "smoothing_eps") s.smoothing_eps = d();
        else if (key == "trunc_schedule") {
            s.trunc_schedule.clear();
            for (const auto& p : split_list(v)) s.trunc_schedule.push_back(to_double(full, p));
        } else throw DomainError("config: unknown key " + full);
    } else if (section == "sim") {
        SimSettings& s = c.sim;
        if (key == "seed") s.seed = static_cast<std::uint64_t>(i());
        else if (key == "n_paths") s.n_paths = static_cast<std::size_t>(i());
        else if (key == "n_steps") s.n_steps = static_cast<int>(i());
        else if (key == "antithetic") s.antithetic = to_bool(full, v);
        else if (key == "bridge_correction") s.bridge_correction = to_bool(full, v);
        else if (key == "dump_paths") {
            s.dump_paths.clear();
            for (const auto& p : split_list(v)) s.dump_paths.push_back(static_cast<std::uint64_t>(to_int(full, p)));
        } else throw DomainError("config: unknown key " + full);
    } else if (section == "output") {
        if (key == "directory") c.output.directory = v;
        else if (key == "format") {
            if (v != "csv" && v != "binary") throw DomainError("config: output.format must be csv or binary");
            c.output.format = v;
        } else throw DomainError("config: unknown key " + full);
    } else {
        throw DomainError("config: unknown section [" + section + "]");
    }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw DomainError(std::string("config: ") + e.what());
    }
    RunConfig c;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw DomainError("config: key '" + section + "' outside a section");
        if (section == "sv") c.sv = SVParams{};
        for (const auto& [key, value] : body) set_key(c, section, key, value.data());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void apply_override(RunConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw DomainError("override must look like section.key=value: " + assignment);
    set_key(config, assignment.substr(0, dot), assignment.substr(dot + 1, eq - dot - 1), assignment.substr(eq + 1));
}

std::string grid_identity(const RunConfig& c) {
    std::ostringstream os;
    const ModelParams& m = c.model;
    os << "[model]\np_hat=" << num(m.p_hat) << "\nk=" << num(m.k) << "\neta=" << num(m.eta) << "\nV=" << num(m.V)
       << "\nsigma=" << num(m.sigma) << "\nS0=" << num(m.S0) << "\nT=" << num(m.T) << "\nq0=" << num(m.q0) << "\n";
    if (c.sv) {
        const SVParams& s = *c.sv;
        os << "[sv]\nalpha=" << num(s.alpha) << "\ntheta=" << num(s.theta) << "\nc=" << num(s.c)
           << "\nrho=" << num(s.rho) << "\nnu0=" << num(s.nu0) << "\nn_nu=" << c.sv_solver.n_nu
           << "\nn_s=" << c.sv_solver.n_s << "\nsubsteps=" << c.sv_solver.substeps << "\nvol=" << c.sv_solver.vol << "\n";
    }
    const RegimeSpec& r = c.regime;
    os << "[regime]\nkind=" << to_string(r.kind) << "\nell=" << num(r.ell) << "\ndelta=" << num(r.delta)
       << "\nb=" << num(r.b) << "\nn_switches=" << (r.n_switches ? std::to_string(*r.n_switches) : "unbounded")
       << "\n";
    const SolverSettings& s = c.solver;
    os << "[solver]\ndx=" << num(s.dx) << "\nhalf_width=" << num(s.half_width) << "\nnt=" << s.nt
       << "\ngrading=" << num(s.grading) << "\nt_cut=" << num(s.t_cut) << "\ntol=" << num(s.tol)
       << "\nsmoothing_eps=" << num(s.smoothing_eps) << "\ntrunc_schedule=" << join(s.trunc_schedule) << "\n";
    return os.str();
}

std::string to_ini(const RunConfig& c) {
    std::ostringstream os;
    os << grid_identity(c);
    const SimSettings& s = c.sim;
    os << "[sim]\nseed=" << s.seed << "\nn_paths=" << s.n_paths << "\nn_steps=" << s.n_steps
       << "\nantithetic=" << (s.antithetic ? "true" : "false")
       << "\nbridge_correction=" << (s.bridge_correction ? "true" : "false") << "\ndump_paths=" << join(s.dump_paths)
       << "\n";
    os << "[output]\ndirectory=" << c.output.directory << "\nformat=" << c.output.format << "\n";
    return os.str();
}

BatchSettings batch_settings(const RunConfig& c) {
    BatchSettings b;
    b.seed = c.sim.seed;
    b.n_paths = c.sim.n_paths;
    b.n_steps = c.sim.n_steps;
    b.antithetic = c.sim.antithetic;
    b.bridge_correction = c.sim.bridge_correction;
    b.dump_indices = c.sim.dump_paths;
    return b;
}

}  // namespace minliq
