#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "minliq/grid.hpp"
#include "minliq/path_sim.hpp"
#include "minliq/pde1d.hpp"
#include "minliq/stats.hpp"

namespace minliq {

std::string sha256_hex(const std::string& data);

// CSV layout: a "t" row, a "x" row, then one row of values per time level.
void write_grid_csv(const std::string& path, const Grid1D& grid);
Grid1D read_grid_csv(const std::string& path);

// Little-endian float64 dump with a short header.
void write_grid_binary(const std::string& path, const Grid1D& grid);
Grid1D read_grid_binary(const std::string& path);

// 2D CSV adds a "nu" and a "s" row; value rows run over (t, nu).
void write_grid2d_csv(const std::string& path, const Grid2D& grid);
Grid2D read_grid2d_csv(const std::string& path);
void write_grid2d_binary(const std::string& path, const Grid2D& grid);
Grid2D read_grid2d_binary(const std::string& path);

void write_records_csv(const std::string& path, const std::vector<PathRecord>& records);
std::vector<PathRecord> read_records_csv(const std::string& path);

// Columns path_index, fqT, A1, A2, A3 only.
void write_invariant_records_csv(const std::string& path, const std::vector<PathRecord>& records);

// Long format: path_index, step, t, w, q.
void write_trajectories_csv(const std::string& path, const std::vector<PathRecord>& records, double T);

nlohmann::json certificate_json(const TruncationCertificate& cert);
nlohmann::json summary_json(const RunSummary& summary);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

// Creates the directory (and parents) if needed.
void ensure_directory(const std::string& dir);

std::string format_double(double v);

}  // namespace minliq
