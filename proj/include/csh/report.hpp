#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "csh/analysis.hpp"
#include "csh/initdata.hpp"
#include "json.hpp"

namespace csh {

class RunArchive;

struct Verdict {
  std::string name;
  bool bounded = false;
  double constant = 0.0;
  std::string detail;
};

// Comparison windows [t0, t1] and [t1, t2] for the one-sided bound checks.
struct ReportWindows {
  double t0 = 2.0, t1 = 10.0, t2 = 40.0;
};
ReportWindows default_windows(double t_end);

struct RunSummary {
  std::string status;
  bool complete = false;
  double p = 3.0;
  double t_end = 0.0;
  int samples = 0;
  EnergyNorms norms;
  ReportWindows windows;

  double energy_drift = 0.0;  // max |E(t) - E(0)| / E(0)
  double charge_drift = 0.0;
  double max_coulomb = 0.0;   // max residual / field scale
  double max_spatial = 0.0;
  double conf_balance = 0.0;  // conformal identity residual, relative

  double weight_exponent = 0.0;    // min((p-1)/2, 2)
  WindowBound potential_bound;     // (1+t)^w potential / E02
  WindowBound weighted_bound;      // (w1^2 + w2^2 + |phi|^2) / (E02 (1+t)^{(5-p)/2})
  WindowBound sup_bound;           // sup |phi| (1+t)^{(p-1)/8} / sqrt(ln(2+t)) / sqrt(E02)
  std::optional<WindowBound> sharp_bound;  // p > 4: max |phi| (1+t+r)^{1/2} / sqrt(E02)
  double flux_null = 0.0, flux_null_weighted = 0.0;
  std::optional<RateFit> potential_fit;
  std::optional<RateFit> second_energy_fit;

  std::vector<Verdict> verdicts;
};

RunSummary summarize(const RunArchive& run, std::optional<ReportWindows> windows = std::nullopt);
std::string summary_text(const RunSummary& s);
nlohmann::ordered_json to_json(const RunSummary& s);

// Writes summary.txt, summary.json and extract_*.csv into out_dir (default
// <run>/report).  Output depends only on the run directory.
RunSummary write_report(const RunArchive& run, const std::filesystem::path& out_dir);

}  // namespace csh
