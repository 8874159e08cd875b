#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "csh/dynamics.hpp"
#include "json.hpp"

namespace csh {

// Cartesian product over p, amplitude and n applied to a base config.
struct SweepSpec {
  RunConfig base;
  std::vector<double> p;
  std::vector<double> amplitude;
  std::vector<int> n;
};

SweepSpec sweep_spec_from_json(const nlohmann::json& j);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

struct SweepPoint {
  int index = 0;
  std::string name;
  RunConfig config;
};
std::vector<SweepPoint> expand(const SweepSpec& spec);

struct SweepRow {
  SweepPoint point;
  std::string status;  // completed, failed or rejected
  std::string failure;
  std::vector<double> values;  // aligned with sweep_columns() after the fixed fields
};

// Numeric aggregate columns, in CSV order after index,name,p,amplitude,n,status.
const std::vector<std::string>& sweep_columns();

// Runs every point under out_dir/runs/<name> with up to `workers` threads.
// Rows come back in index order; a failed point does not stop the others.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir, int workers);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace csh
