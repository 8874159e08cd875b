#include "csh/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "csh/diagnostics.hpp"
#include "csh/io.hpp"

namespace csh {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

ReportWindows default_windows(double t_end) {
  if (t_end >= 20.0) return {2.0, 10.0, t_end};
  return {0.2 * t_end, 0.5 * t_end, t_end};
}

namespace {

constexpr double kWindowTolerance = 0.10;
constexpr double kSupTolerance = 0.15;
constexpr double kFluxTolerance = 0.05;
constexpr double kGrowthCeiling = 5.5;

double max_rel_drift(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x - v.front()));
  const double s = std::abs(v.front());
  return s > 0.0 ? m / s : m;
}

double max_ratio(const std::vector<double>& num, const std::vector<double>& den) {
  double m = 0.0;
  for (std::size_t k = 0; k < num.size(); ++k) {
    const double d = den[k] > 0.0 ? den[k] : 1.0;
    if (std::isfinite(num[k])) m = std::max(m, num[k] / d);
  }
  return m;
}

std::optional<RateFit> try_fit(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1) {
  try {
    return fit_rate(t, y, t0, t1);
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

Verdict window_verdict(const std::string& name, const WindowBound& w, double tol) {
  Verdict v;
  v.name = name;
  v.constant = std::max(w.early.value, w.late.value);
  v.bounded = w.finite && (v.constant == 0.0 || w.growth <= tol);
  char buf[160];
  std::snprintf(buf, sizeof buf, "early C = %.6g, late C = %.6g, growth %+.3f%% (limit %.0f%%)", w.early.value,
                w.late.value, 100.0 * w.growth, 100.0 * tol);
  v.detail = buf;
  return v;
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ordered_json window_json(const WindowBound& w) {
  return {{"early", w.early.value}, {"early_t", w.early.t_arg}, {"late", w.late.value},
          {"late_t", w.late.t_arg}, {"growth", w.growth},         {"finite", w.finite}};
}

ordered_json fit_json(const std::optional<RateFit>& f) {
  if (!f) return nullptr;
  return {{"model", to_string(f->model)}, {"exponent", f->exponent}, {"intercept", f->intercept},
          {"r_squared", f->r_squared},    {"t_min", f->t_min},       {"t_max", f->t_max},
          {"samples", f->samples}};
}

}  // namespace

RunSummary summarize(const RunArchive& run, std::optional<ReportWindows> windows) {
  RunSummary s;
  const RunConfig& cfg = run.config();
  const CsvTable& d = run.diagnostics();
  s.status = run.status();
  s.complete = s.status == "completed";
  s.p = cfg.p;
  s.samples = static_cast<int>(d.size());
  const auto& m = run.manifest();
  if (m.contains("energy_norms")) {
    s.norms.e00 = m["energy_norms"].value("e00", 0.0);
    s.norms.e02 = m["energy_norms"].value("e02", 0.0);
    s.norms.e10 = m["energy_norms"].value("e10", 0.0);
  }
  if (d.size() == 0) {
    s.windows = windows.value_or(default_windows(0.0));
    return s;
  }
  const auto t = d.column("t");
  s.t_end = t.back();
  s.windows = windows.value_or(default_windows(s.t_end));
  const ReportWindows& W = s.windows;
  const double p = s.p;
  const double e02 = s.norms.e02 > 0.0 ? s.norms.e02 : 1.0;
  const double root_e02 = std::sqrt(e02);

  s.energy_drift = max_rel_drift(d.column("energy"));
  s.charge_drift = max_rel_drift(d.column("charge"));
  const auto scale = d.column("field_scale");
  s.max_coulomb = max_ratio(d.column("res_coulomb"), scale);
  s.max_spatial = max_ratio(d.column("res_spatial"), scale);

  const auto conf = d.column("conf_total");
  const auto pot = d.column("potential");
  double integral = 0.0, conf_scale = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    conf_scale = std::max(conf_scale, std::abs(conf[k]));
    if (k > 0) {
      const double fa = (p - 5.0) * t[k - 1] / (p + 1.0) * pot[k - 1];
      const double fb = (p - 5.0) * t[k] / (p + 1.0) * pot[k];
      integral += 0.5 * (t[k] - t[k - 1]) * (fa + fb);
    }
  }
  const double conf_res = conf.back() - conf.front() + integral;
  s.conf_balance = conf_scale > 0.0 ? std::abs(conf_res) / conf_scale : std::abs(conf_res);

  s.weight_exponent = decay_weight_exponent(p);
  const double we = s.weight_exponent;
  s.potential_bound = window_bound(t, pot, [we](double x) { return std::pow(1.0 + x, we); }, e02, W.t0, W.t1, W.t2);

  const auto w1 = d.column("w1"), w2 = d.column("w2"), l2 = d.column("phi_l2");
  std::vector<double> wsum(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) wsum[k] = w1[k] * w1[k] + w2[k] * w2[k] + l2[k] * l2[k];
  s.weighted_bound = window_bound(
      t, wsum, [p](double x) { return std::pow(1.0 + x, -(5.0 - p) / 2.0); }, e02, W.t0, W.t1, W.t2);

  s.sup_bound = window_bound(
      t, d.column("sup_phi"),
      [p](double x) { return std::pow(1.0 + x, (p - 1.0) / 8.0) / std::sqrt(std::log(2.0 + x)); }, root_e02, W.t0,
      W.t1, W.t2);
  if (p > 4.0)
    s.sharp_bound =
        window_bound(t, d.column("sup_weighted"), [](double) { return 1.0; }, root_e02, W.t0, W.t1, W.t2);

  s.flux_null = d.column("flux_null").back();
  s.flux_null_weighted = d.column("flux_null_weighted").back();
  s.potential_fit = try_fit(t, pot, W.t0, W.t2);
  s.second_energy_fit = try_fit(t, d.column("second_energy"), W.t0, W.t2);

  s.verdicts.push_back(window_verdict("potential_decay", s.potential_bound, kWindowTolerance));
  s.verdicts.push_back(window_verdict("weighted_energy", s.weighted_bound, kWindowTolerance));
  {
    Verdict v;
    v.name = "null_flux";
    v.constant = s.norms.e00 > 0.0 ? s.flux_null / s.norms.e00 : 0.0;
    v.bounded = s.flux_null <= s.norms.e00 * (1.0 + kFluxTolerance) + 1e-300;
    v.detail = fmt("flux / E00 = %.6g (limit 1.05)", v.constant);
    s.verdicts.push_back(v);
  }
  {
    Verdict v;
    v.name = "null_flux_weighted";
    v.constant = s.flux_null_weighted / e02;
    v.bounded = std::isfinite(s.flux_null_weighted);
    v.detail = fmt("weighted flux / E02 = %.6g", v.constant);
    s.verdicts.push_back(v);
  }
  {
    Verdict v;
    v.name = "second_energy_growth";
    if (s.second_energy_fit) {
      v.constant = s.second_energy_fit->exponent;
      v.bounded = v.constant <= kGrowthCeiling;
      v.detail = fmt("fitted exponent %.4f (limit 5.5)", v.constant);
    } else {
      v.bounded = true;
      v.detail = "too few positive samples to fit; not assessed";
    }
    s.verdicts.push_back(v);
  }
  s.verdicts.push_back(window_verdict("pointwise_decay", s.sup_bound, kSupTolerance));
  if (s.sharp_bound) s.verdicts.push_back(window_verdict("sharp_pointwise_decay", *s.sharp_bound, kSupTolerance));
  {
    Verdict v;
    v.name = "conformal_identity";
    v.constant = s.conf_balance;
    v.bounded = s.conf_balance <= 1e-3;
    v.detail = fmt("balance residual %.3e relative (limit 1e-3)", s.conf_balance);
    s.verdicts.push_back(v);
  }
  return s;
}

std::string summary_text(const RunSummary& s) {
  std::string out;
  if (!s.complete) out += "PARTIAL REPORT: run status is '" + s.status + "'\n";
  out += "p = " + fmt("%.6g", s.p) + ", t_end = " + fmt("%.6g", s.t_end) + ", samples = " +
         std::to_string(s.samples) + "\n";
  out += "E00 = " + fmt("%.10g", s.norms.e00) + ", E02 = " + fmt("%.10g", s.norms.e02) + ", E10 = " +
         fmt("%.10g", s.norms.e10) + "\n";
  out += "windows [" + fmt("%.4g", s.windows.t0) + ", " + fmt("%.4g", s.windows.t1) + "] and [" +
         fmt("%.4g", s.windows.t1) + ", " + fmt("%.4g", s.windows.t2) + "]\n";
  out += "energy drift " + fmt("%.3e", s.energy_drift) + ", charge drift " + fmt("%.3e", s.charge_drift) + "\n";
  out += "constraint residuals / field scale: coulomb " + fmt("%.3e", s.max_coulomb) + ", spatial " +
         fmt("%.3e", s.max_spatial) + "\n";
  if (s.potential_fit)
    out += "potential fitted exponent " + fmt("%.4f", s.potential_fit->exponent) + " (r^2 " +
           fmt("%.4f", s.potential_fit->r_squared) + ")\n";
  for (const auto& v : s.verdicts)
    out += (v.bounded ? "BOUNDED     " : "NOT BOUNDED ") + v.name + ": " + v.detail + "\n";
  return out;
}

ordered_json to_json(const RunSummary& s) {
  ordered_json j;
  j["status"] = s.status;
  j["complete"] = s.complete;
  j["p"] = s.p;
  j["t_end"] = s.t_end;
  j["samples"] = s.samples;
  j["energy_norms"] = {{"e00", s.norms.e00}, {"e02", s.norms.e02}, {"e10", s.norms.e10}};
  j["windows"] = {s.windows.t0, s.windows.t1, s.windows.t2};
  j["energy_drift"] = s.energy_drift;
  j["charge_drift"] = s.charge_drift;
  j["max_coulomb"] = s.max_coulomb;
  j["max_spatial"] = s.max_spatial;
  j["conf_balance"] = s.conf_balance;
  j["weight_exponent"] = s.weight_exponent;
  j["potential_bound"] = window_json(s.potential_bound);
  j["weighted_bound"] = window_json(s.weighted_bound);
  j["sup_bound"] = window_json(s.sup_bound);
  j["sharp_bound"] = s.sharp_bound ? window_json(*s.sharp_bound) : ordered_json(nullptr);
  j["flux_null"] = s.flux_null;
  j["flux_null_weighted"] = s.flux_null_weighted;
  j["potential_fit"] = fit_json(s.potential_fit);
  j["second_energy_fit"] = fit_json(s.second_energy_fit);
  ordered_json vs = ordered_json::array();
  for (const auto& v : s.verdicts)
    vs.push_back({{"name", v.name}, {"bounded", v.bounded}, {"constant", v.constant}, {"detail", v.detail}});
  j["verdicts"] = vs;
  return j;
}

namespace {

void write_extract(const fs::path& path, const std::vector<std::string>& names,
                   const std::vector<std::vector<double>>& cols) {
  std::string out;
  for (std::size_t c = 0; c < names.size(); ++c) out += (c ? "," : "") + names[c];
  out += '\n';
  const std::size_t rows = cols.empty() ? 0 : cols.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) out += (c ? "," : "") + format_double(cols[c][r]);
    out += '\n';
  }
  write_text(path, out);
}

}  // namespace

RunSummary write_report(const RunArchive& run, const fs::path& out_dir) {
  const RunSummary s = summarize(run);
  fs::create_directories(out_dir);
  write_text(out_dir / "summary.txt", summary_text(s));
  write_json(out_dir / "summary.json", to_json(s));

  const CsvTable& d = run.diagnostics();
  if (d.size() == 0) return s;
  const auto t = d.column("t");
  const double p = s.p;
  const double e02 = s.norms.e02 > 0.0 ? s.norms.e02 : 1.0;
  auto col = [&](const std::string& n) { return d.column(n); };
  auto map = [&](const std::vector<double>& y, auto f) {
    std::vector<double> o(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) o[k] = f(t[k], y[k]);
    return o;
  };

  write_extract(out_dir / "extract_conservation.csv", {"t", "energy", "charge"}, {t, col("energy"), col("charge")});
  const double we = s.weight_exponent;
  const auto w1 = col("w1"), w2 = col("w2"), l2 = col("phi_l2");
  std::vector<double> wsum(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) wsum[k] = w1[k] * w1[k] + w2[k] * w2[k] + l2[k] * l2[k];
  write_extract(out_dir / "extract_decay.csv",
                {"t", "potential", "potential_normalized", "weighted_potential", "weighted_energy_normalized",
                 "sup_phi", "sup_normalized", "sup_weighted"},
                {t, col("potential"),
                 map(col("potential"), [&](double x, double y) { return std::pow(1.0 + x, we) * y / e02; }),
                 col("weighted_potential"),
                 map(wsum, [&](double x, double y) { return y / (e02 * std::pow(1.0 + x, (5.0 - p) / 2.0)); }),
                 col("sup_phi"),
                 map(col("sup_phi"),
                     [&](double x, double y) {
                       return y * std::pow(1.0 + x, (p - 1.0) / 8.0) / std::sqrt(std::log(2.0 + x) * e02);
                     }),
                 col("sup_weighted")});
  write_extract(out_dir / "extract_flux.csv", {"t", "flux_null", "flux_null_weighted"},
                {t, col("flux_null"), col("flux_null_weighted")});
  write_extract(out_dir / "extract_second_energy.csv", {"t", "second_energy"}, {t, col("second_energy")});
  write_extract(out_dir / "extract_constraints.csv",
                {"t", "res_coulomb", "res_spatial", "res_temporal01", "res_temporal02", "field_scale"},
                {t, col("res_coulomb"), col("res_spatial"), col("res_temporal01"), col("res_temporal02"),
                 col("field_scale")});
  return s;
}

}  // namespace csh
