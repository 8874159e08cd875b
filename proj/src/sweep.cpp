#include "csh/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "csh/config.hpp"
#include "csh/io.hpp"
#include "csh/report.hpp"

namespace csh {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
std::vector<T> axis(const json& g, const std::string& key, T fallback, std::vector<std::string>& issues) {
  if (!g.contains(key)) return {fallback};
  const json& v = g[key];
  if (!v.is_array() || v.empty()) {
    issues.push_back("sweep.grid." + key + ": expected a non-empty array");
    return {fallback};
  }
  std::vector<T> out;
  for (const auto& e : v) {
    if constexpr (std::is_integral_v<T>) {
      if (!e.is_number_integer()) {
        issues.push_back("sweep.grid." + key + ": expected integers");
        return {fallback};
      }
    } else if (!e.is_number()) {
      issues.push_back("sweep.grid." + key + ": expected numbers");
      return {fallback};
    }
    out.push_back(e.get<T>());
  }
  return out;
}

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

SweepSpec sweep_spec_from_json(const json& j) {
  std::vector<std::string> issues;
  if (!j.is_object()) throw ConfigError({"sweep: expected an object"});
  for (const auto& [k, v] : j.items())
    if (k != "version" && k != "base" && k != "grid") issues.push_back("sweep." + k + ": unknown key");
  if (j.contains("version") && j["version"] != kConfigVersion)
    issues.push_back("sweep.version: unsupported version");
  SweepSpec s;
  if (j.contains("base")) {
    try {
      s.base = run_config_from_json(j["base"]);
    } catch (const ConfigError& e) {
      for (auto m : e.issues) issues.push_back("sweep.base" + (m.rfind("config", 0) == 0 ? m.substr(6) : ": " + m));
    }
  }
  const json g = j.value("grid", json::object());
  if (!g.is_object()) {
    issues.push_back("sweep.grid: expected an object");
  } else {
    for (const auto& [k, v] : g.items())
      if (k != "p" && k != "amplitude" && k != "n") issues.push_back("sweep.grid." + k + ": unknown key");
    s.p = axis<double>(g, "p", s.base.p, issues);
    s.amplitude = axis<double>(g, "amplitude", s.base.data.amplitude, issues);
    s.n = axis<int>(g, "n", s.base.n, issues);
  }
  if (!issues.empty()) throw ConfigError(issues);
  return s;
}

SweepSpec load_sweep_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open"});
  try {
    return sweep_spec_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
}

std::vector<SweepPoint> expand(const SweepSpec& spec) {
  std::vector<SweepPoint> out;
  int idx = 0;
  for (double p : spec.p)
    for (double a : spec.amplitude)
      for (int n : spec.n) {
        SweepPoint sp;
        sp.index = idx;
        char buf[24];
        std::snprintf(buf, sizeof buf, "run_%03d", idx);
        sp.name = std::string(buf) + "_p" + tag(p) + "_a" + tag(a) + "_n" + std::to_string(n);
        sp.config = spec.base;
        sp.config.p = p;
        sp.config.data.amplitude = a;
        sp.config.n = n;
        out.push_back(sp);
        ++idx;
      }
  return out;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> c = {
      "steps",          "t_end",           "e00",          "e02",           "e10",
      "weight_exponent", "potential_c_early", "potential_c_late", "potential_growth", "weighted_c",
      "sup_c",          "potential_exponent", "second_energy_exponent", "energy_drift", "charge_drift",
      "flux_null_over_e00"};
  return c;
}

namespace {

SweepRow execute(const SweepPoint& pt, const fs::path& out_dir) {
  SweepRow row;
  row.point = pt;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.values.assign(sweep_columns().size(), nan);
  try {
    validate(pt.config);
  } catch (const DomainError& e) {
    row.status = "rejected";
    row.failure = e.what();
    return row;
  }
  const fs::path dir = out_dir / "runs" / pt.name;
  try {
    const RunResult r = run(pt.config, dir);
    row.status = r.status;
    row.failure = r.failure;
    const RunArchive arc(dir);
    const RunSummary s = summarize(arc);
    row.values = {static_cast<double>(r.steps),
                  r.t_end,
                  s.norms.e00,
                  s.norms.e02,
                  s.norms.e10,
                  s.weight_exponent,
                  s.potential_bound.early.value,
                  s.potential_bound.late.value,
                  s.potential_bound.growth,
                  std::max(s.weighted_bound.early.value, s.weighted_bound.late.value),
                  std::max(s.sup_bound.early.value, s.sup_bound.late.value),
                  s.potential_fit ? s.potential_fit->exponent : nan,
                  s.second_energy_fit ? s.second_energy_fit->exponent : nan,
                  s.energy_drift,
                  s.charge_drift,
                  s.norms.e00 > 0.0 ? s.flux_null / s.norms.e00 : 0.0};
  } catch (const std::exception& e) {
    row.status = "failed";
    row.failure = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const fs::path& out_dir, int workers) {
  const std::vector<SweepPoint> pts = expand(spec);
  std::vector<SweepRow> rows(pts.size());
  fs::create_directories(out_dir / "runs");
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < pts.size(); k = next++) rows[k] = execute(pts[k], out_dir);
  };
  const int nw = std::max(1, std::min<int>(workers, static_cast<int>(pts.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < nw; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  write_text(out_dir / "sweep.csv", sweep_csv(rows));
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "index,name,p,amplitude,n,status";
  for (const auto& c : sweep_columns()) out += "," + c;
  out += ",failure\n";
  for (const auto& r : rows) {
    out += std::to_string(r.point.index) + "," + r.point.name + "," + format_double(r.point.config.p) + "," +
           format_double(r.point.config.data.amplitude) + "," + std::to_string(r.point.config.n) + "," + r.status;
    for (double v : r.values) out += "," + format_double(v);
    out += "," + csv_safe(r.failure) + "\n";
  }
  return out;
}

}  // namespace csh
