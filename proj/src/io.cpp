#include "minliq/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <openssl/evp.h>

#include "minliq/errors.hpp"

namespace minliq {

namespace fs = std::filesystem;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const std::string& path) {
    try {
        return nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad JSON in " + path + ": " + e.what());
    }
}

namespace {

double parse_double(const std::string& s, const std::string& where) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw IoError("bad number '" + s + "' in " + where);
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, line, boost::algorithm::is_any_of(","));
    for (auto& p : parts) boost::algorithm::trim(p);
    return parts;
}

void write_row(std::ostream& os, const char* name, const std::vector<double>& v) {
    os << name;
    for (double d : v) os << ',' << format_double(d);
    os << '\n';
}

void write_values(std::ostream& os, const double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (i) os << ',';
        os << format_double(v[i]);
    }
    os << '\n';
}

std::vector<double> read_axis(std::istream& in, const char* name, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": missing " + name + " row");
    auto parts = split_csv(line);
    if (parts.empty() || parts[0] != name) throw IoError(path + ": expected " + std::string(name) + " row");
    std::vector<double> axis;
    for (std::size_t i = 1; i < parts.size(); ++i) axis.push_back(parse_double(parts[i], path));
    return axis;
}

void read_values(std::istream& in, std::vector<double>& values, std::size_t rows, std::size_t cols,
                 const std::string& path) {
    values.reserve(rows * cols);
    std::string line;
    for (std::size_t r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) throw IoError(path + ": truncated value block");
        const auto parts = split_csv(line);
        if (parts.size() != cols) throw IoError(path + ": row width does not match axis");
        for (const auto& p : parts) values.push_back(parse_double(p, path));
    }
}

constexpr char kMagic1D[8] = {'M', 'L', 'Q', 'G', '1', 'D', 0, 1};
constexpr char kMagic2D[8] = {'M', 'L', 'Q', 'G', '2', 'D', 0, 1};

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_doubles(std::ostream& os, const std::vector<double>& v) {
    for (double d : v) {
        std::uint64_t bits;
        std::memcpy(&bits, &d, 8);
        put_u64(os, bits);
    }
}

std::vector<double> get_doubles(std::istream& in, std::size_t n) {
    std::vector<double> v(n);
    for (auto& d : v) {
        const std::uint64_t bits = get_u64(in);
        std::memcpy(&d, &bits, 8);
    }
    return v;
}

}  // namespace

void write_grid_csv(const std::string& path, const Grid1D& g) {
    std::ostringstream os;
    write_row(os, "t", g.t);
    write_row(os, "x", g.x);
    for (std::size_t j = 0; j < g.nt(); ++j) write_values(os, g.values.data() + j * g.nx(), g.nx());
    write_text(path, os.str());
}

Grid1D read_grid_csv(const std::string& path) {
    std::istringstream in(read_text(path));
    Grid1D g;
    g.t = read_axis(in, "t", path);
    g.x = read_axis(in, "x", path);
    read_values(in, g.values, g.t.size(), g.x.size(), path);
    return g;
}

void write_grid_binary(const std::string& path, const Grid1D& g) {
    std::ostringstream os;
    os.write(kMagic1D, 8);
    put_u64(os, g.t.size());
    put_u64(os, g.x.size());
    put_doubles(os, g.t);
    put_doubles(os, g.x);
    put_doubles(os, g.values);
    write_text(path, os.str());
}

Grid1D read_grid_binary(const std::string& path) {
    std::istringstream in(read_text(path));
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic1D, 8) != 0) throw IoError(path + ": not a 1D grid dump");
    Grid1D g;
    const std::size_t nt = get_u64(in);
    const std::size_t nx = get_u64(in);
    g.t = get_doubles(in, nt);
    g.x = get_doubles(in, nx);
    g.values = get_doubles(in, nt * nx);
    if (!in) throw IoError(path + ": truncated grid dump");
    return g;
}

void write_grid2d_csv(const std::string& path, const Grid2D& g) {
    std::ostringstream os;
    write_row(os, "t", g.t);
    write_row(os, "nu", g.nu);
    write_row(os, "s", g.s);
    for (std::size_t r = 0; r < g.t.size() * g.nu.size(); ++r)
        write_values(os, g.values.data() + r * g.s.size(), g.s.size());
    write_text(path, os.str());
}

Grid2D read_grid2d_csv(const std::string& path) {
    std::istringstream in(read_text(path));
    Grid2D g;
    g.t = read_axis(in, "t", path);
    g.nu = read_axis(in, "nu", path);
    g.s = read_axis(in, "s", path);
    read_values(in, g.values, g.t.size() * g.nu.size(), g.s.size(), path);
    return g;
}

void write_grid2d_binary(const std::string& path, const Grid2D& g) {
    std::ostringstream os;
    os.write(kMagic2D, 8);
    put_u64(os, g.t.size());
    put_u64(os, g.nu.size());
    put_u64(os, g.s.size());
    put_doubles(os, g.t);
    put_doubles(os, g.nu);
    put_doubles(os, g.s);
    put_doubles(os, g.values);
    write_text(path, os.str());
}

Grid2D read_grid2d_binary(const std::string& path) {
    std::istringstream in(read_text(path));
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic2D, 8) != 0) throw IoError(path + ": not a 2D grid dump");
    Grid2D g;
    const std::size_t nt = get_u64(in);
    const std::size_t nn = get_u64(in);
    const std::size_t ns = get_u64(in);
    g.t = get_doubles(in, nt);
    g.nu = get_doubles(in, nn);
    g.s = get_doubles(in, ns);
    g.values = get_doubles(in, nt * nn * ns);
    if (!in) throw IoError(path + ": truncated grid dump");
    return g;
}

static const char* kRecordHeader = "path_index,fqT,XT,XT_closed,A1,A2,A3,A,liquidated,no_trades,n_trades,wT";

void write_records_csv(const std::string& path, const std::vector<PathRecord>& records) {
    std::ostringstream os;
    os << kRecordHeader << '\n';
    for (const auto& r : records) {
        os << r.path_index << ',' << format_double(r.fqT) << ',' << format_double(r.XT) << ','
           << format_double(r.XT_closed) << ',' << format_double(r.A1) << ',' << format_double(r.A2) << ','
           << format_double(r.A3) << ',' << format_double(r.A) << ',' << (r.liquidated ? 1 : 0) << ','
           << (r.no_trades ? 1 : 0) << ',' << r.n_trades << ',' << format_double(r.wT) << '\n';
    }
    write_text(path, os.str());
}

std::vector<PathRecord> read_records_csv(const std::string& path) {
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line) || boost::algorithm::trim_copy(line) != kRecordHeader)
        throw IoError(path + ": unexpected records header");
    std::vector<PathRecord> out;
    while (std::getline(in, line)) {
        if (boost::algorithm::trim_copy(line).empty()) continue;
        const auto p = split_csv(line);
        if (p.size() != 12) throw IoError(path + ": record row has " + std::to_string(p.size()) + " fields");
        PathRecord r;
        r.path_index = std::stoull(p[0]);
        r.fqT = parse_double(p[1], path);
        r.XT = parse_double(p[2], path);
        r.XT_closed = parse_double(p[3], path);
        r.A1 = parse_double(p[4], path);
        r.A2 = parse_double(p[5], path);
        r.A3 = parse_double(p[6], path);
        r.A = parse_double(p[7], path);
        r.liquidated = p[8] == "1";
        r.no_trades = p[9] == "1";
        r.n_trades = std::stoi(p[10]);
        r.wT = parse_double(p[11], path);
        out.push_back(std::move(r));
    }
    return out;
}

void write_invariant_records_csv(const std::string& path, const std::vector<PathRecord>& records) {
    std::ostringstream os;
    os << "path_index,fqT,A1,A2,A3\n";
    for (const auto& r : records)
        os << r.path_index << ',' << format_double(r.fqT) << ',' << format_double(r.A1) << ','
           << format_double(r.A2) << ',' << format_double(r.A3) << '\n';
    write_text(path, os.str());
}

void write_trajectories_csv(const std::string& path, const std::vector<PathRecord>& records, double T) {
    std::ostringstream os;
    os << "path_index,step,t,w,q\n";
    for (const auto& r : records) {
        if (r.q_traj.empty()) continue;
        const double dt = T / static_cast<double>(r.q_traj.size() - 1);
        for (std::size_t i = 0; i < r.q_traj.size(); ++i)
            os << r.path_index << ',' << i << ',' << format_double(static_cast<double>(i) * dt) << ','
               << format_double(r.w[i]) << ',' << format_double(r.q_traj[i]) << '\n';
    }
    write_text(path, os.str());
}

nlohmann::json certificate_json(const TruncationCertificate& c) {
    nlohmann::json j;
    j["levels"] = c.levels;
    j["deltas"] = c.deltas;
    j["min_increments"] = c.min_increments;
    j["monotone"] = c.monotone;
    j["converged"] = c.converged;
    return j;
}

namespace {

nlohmann::json moments_json(const Moments& m) {
    nlohmann::json j;
    j["n"] = m.n;
    j["mean"] = m.mean;
    j["variance"] = m.variance;
    if (m.degenerate) {
        j["skew"] = nullptr;
        j["excess_kurtosis"] = nullptr;
        j["degenerate"] = true;
    } else {
        j["skew"] = m.skew;
        j["excess_kurtosis"] = m.excess_kurtosis;
        j["degenerate"] = false;
    }
    return j;
}

template <class T>
nlohmann::json opt(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json summary_json(const RunSummary& s) {
    nlohmann::json j;
    j["n_paths"] = s.n_paths;
    j["n_no_trades"] = s.n_no_trades;
    j["p_liquidated"] = s.p_liquidated;
    j["p_liquidated_se"] = s.p_liquidated_se;
    j["n_positive"] = s.n_positive;
    j["mean_fq_pos"] = opt(s.mean_fq_pos);
    j["sd_fq_pos"] = opt(s.sd_fq_pos);
    j["mean_fq_pos_se"] = opt(s.mean_fq_pos_se);
    j["A"] = moments_json(s.A);
    j["A1"] = moments_json(s.A1);
    j["A2"] = moments_json(s.A2);
    j["A3"] = moments_json(s.A3);
    nlohmann::json buckets = nlohmann::json::array();
    for (const auto& b : s.conditional) {
        nlohmann::json e;
        e["bucket"] = b.bucket.index;
        e["center"] = b.bucket.center;
        e["lo"] = b.bucket.lo;
        e["hi"] = b.bucket.hi;
        e["A2"] = moments_json(b.A2);
        e["A3"] = moments_json(b.A3);
        buckets.push_back(e);
    }
    j["conditional"] = buckets;
    if (s.exp_tail) {
        const auto& f = *s.exp_tail;
        j["exp_tail"] = {{"n", f.n}, {"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2},
                         {"rate_from_mean", 1.0 / f.mean}, {"slope_over_rate", f.ratio}};
    } else {
        j["exp_tail"] = nullptr;
    }
    return j;
}

}  // namespace minliq
