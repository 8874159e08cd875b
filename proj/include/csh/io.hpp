#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "csh/dynamics.hpp"
#include "json.hpp"

namespace csh {

struct IoError : Error {
  using Error::Error;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

// Little-endian: "CSHW", u32 version, u32 n, f64 L, f64 t, f64 p, then the
// planes Re phi, Im phi, Re psi, Im psi as n*n row-major f64.
void write_snapshot(const std::filesystem::path& path, const FieldState& s);
struct SnapshotHeader {
  std::uint32_t version = 0;
  int n = 0;
  double L = 0.0, t = 0.0, p = 0.0;
};
SnapshotHeader read_snapshot_header(const std::filesystem::path& path);
// Reuses g when it matches the header; otherwise builds a grid.
FieldState read_snapshot(const std::filesystem::path& path, GridPtr g = nullptr);
std::string snapshot_name(int step);

std::string format_double(double v);  // %.17g

// Numeric CSV with a header row.  Non-numeric cells read as NaN.
class CsvTable {
 public:
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  bool has(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  std::size_t size() const { return rows.size(); }
};
CsvTable read_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);
nlohmann::json read_json(const std::filesystem::path& path);

// Read-only view of a run directory.
class RunArchive {
 public:
  struct Snapshot {
    int step = 0;
    double t = 0.0;
    std::filesystem::path path;
  };

  explicit RunArchive(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  const RunConfig& config() const { return config_; }
  const nlohmann::json& manifest() const { return manifest_; }
  std::string status() const;
  EvolutionOptions evolution() const;
  GridPtr grid() const { return grid_; }

  const std::vector<Snapshot>& snapshots() const { return snaps_; }
  // Snapshots with t in [t_a, t_b]; throws unless both ends are stored.
  std::vector<Snapshot> snapshots_in(double t_a, double t_b) const;
  FieldState load(const Snapshot& s) const;

  const CsvTable& diagnostics() const { return diag_; }
  bool has_null_series() const { return !null_.header.empty(); }
  const CsvTable& null_series() const { return null_; }

 private:
  std::filesystem::path dir_;
  nlohmann::json manifest_;
  RunConfig config_;
  GridPtr grid_;
  std::vector<Snapshot> snaps_;
  CsvTable diag_;
  CsvTable null_;
};

}  // namespace csh
