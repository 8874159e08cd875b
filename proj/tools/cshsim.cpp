// Command-line driver: run, sweep, audit, conformal-check, fit-rates,
// check-logsobolev, report.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "csh/analysis.hpp"
#include "csh/config.hpp"
#include "csh/conformal.hpp"
#include "csh/io.hpp"
#include "csh/multipliers.hpp"
#include "csh/report.hpp"
#include "csh/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace csh;

namespace {

enum Exit { kOk = 0, kError = 1, kConfig = 2, kRunFailed = 3, kCheckFailed = 4 };

void emit(const ordered_json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (!out.empty()) write_text(out, text);
  std::cout << text;
}

int fail_json(int code, const std::string& kind, const std::string& reason,
              const std::vector<std::string>& issues = {}) {
  ordered_json j;
  j["error"] = kind;
  j["reason"] = reason;
  if (!issues.empty()) j["issues"] = issues;
  std::cerr << j.dump() << "\n";
  return code;
}

int cmd_run(const std::string& config, const std::string& out, bool flat, std::optional<std::uint64_t> seed) {
  RunConfig cfg = config.empty() ? RunConfig{} : load_run_config(config);
  if (flat) cfg.flat = true;
  if (seed) cfg.seed = *seed;
  try {
    validate(cfg);
  } catch (const DomainError& e) {
    throw ConfigError({e.what()});
  }
  const RunResult r = run(cfg, out);
  std::cout << "status " << r.status << ", steps " << r.steps << ", t_end " << format_double(r.t_end) << ", out "
            << out << "\n";
  if (r.status != "completed") return fail_json(kRunFailed, "run_failed", r.failure);
  return kOk;
}

int cmd_sweep(const std::string& config, const std::string& out, int workers, bool flat,
              std::optional<std::uint64_t> seed) {
  if (config.empty()) throw ConfigError({"sweep: --config is required"});
  SweepSpec spec = load_sweep_spec(config);
  if (flat) spec.base.flat = true;
  if (seed) spec.base.seed = *seed;
  const auto rows = run_sweep(spec, out, workers);
  int bad = 0;
  for (const auto& r : rows) {
    std::cout << r.point.name << ": " << r.status << (r.failure.empty() ? "" : " (" + r.failure + ")") << "\n";
    if (r.status != "completed") ++bad;
  }
  std::cout << rows.size() << " runs, " << bad << " not completed; table " << (fs::path(out) / "sweep.csv").string()
            << "\n";
  return bad ? kRunFailed : kOk;
}

ordered_json audit_json(const AuditReport& a) {
  ordered_json j;
  j["spec"] = a.spec;
  j["region"] = to_string(a.region);
  j["t_a"] = a.t_a;
  j["t_b"] = a.t_b;
  j["samples"] = a.samples;
  j["boundary_a"] = a.boundary_a;
  j["boundary_b"] = a.boundary_b;
  j["bulk"] = a.bulk;
  j["null_tl"] = a.null_tl;
  j["null_chi_a"] = a.null_chi_a;
  j["null_chi_b"] = a.null_chi_b;
  j["null_total"] = a.null_total;
  j["residual"] = a.residual;
  j["scale"] = a.scale;
  j["relative"] = a.relative;
  j["bulk_min"] = a.bulk_min;
  j["cs_force"] = a.cs_force;
  return j;
}

int cmd_audit(const std::string& run_dir, const std::string& spec, double t_a, double t_b, const std::string& out) {
  const RunArchive arc(run_dir);
  const MultiplierSpec ms = find_spec(spec, arc.config().p);
  emit(audit_json(audit(arc, ms, t_a, t_b)), out);
  return kOk;
}

int cmd_conformal(const std::string& run_dir, int samples, std::uint64_t seed, double h0,
                  const std::vector<int>& strides, double margin, double eps, const std::string& out) {
  ordered_json j;
  // Map checks on random points of the source region.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double round_trip = 0.0, relation = 0.0, reciprocity = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double t = 10.0 * u(rng);
    const double rmax = std::sqrt((t + 2.0) * (t + 1.0));
    const double r = rmax * std::sqrt(u(rng)), th = 2.0 * M_PI * u(rng);
    const ConformalPoint c = forward_map(t, r * std::cos(th), r * std::sin(th));
    const ConformalPoint b = inverse_map(c.tt, c.xt1, c.xt2);
    round_trip = std::max({round_trip, std::abs(b.t - c.t) / (1.0 + std::abs(c.t)),
                           std::abs(b.x1 - c.x1) / (1.0 + std::abs(c.x1)),
                           std::abs(b.x2 - c.x2) / (1.0 + std::abs(c.x2))});
    const double lhs = 2.0 + t + r, rhs = 1.0 / (1.0 - c.tt - std::hypot(c.xt1, c.xt2));
    relation = std::max(relation, std::abs(lhs - rhs) / lhs);
    const double y0 = 1.0 - c.tt;
    reciprocity = std::max(reciprocity, std::abs((y0 * y0 - c.xt1 * c.xt1 - c.xt2 * c.xt2) * c.lambda - 1.0));
  }
  j["map"] = {{"points", 100}, {"round_trip", round_trip}, {"relation", relation}, {"reciprocity", reciprocity}};
  if (!run_dir.empty()) {
    const RunArchive arc(run_dir);
    const RefinementStudy rs = residual_refinement(arc, samples, seed, h0, strides, margin);
    j["residual"] = {{"flat", arc.config().flat}, {"samples", samples}, {"margin", margin},
                     {"strides", rs.strides},     {"h", rs.h},           {"median", rs.median},
                     {"max", rs.max},             {"order", rs.order}};
    const SnapshotSeries series(arc, 1);
    const auto pts = sample_image_cone(series, arc.config().L, samples, seed + 1, 0.0, margin);
    j["normalized_bound"] = {{"eps", eps}, {"value", normalized_image_bound(series, pts, eps)}};
  }
  emit(j, out);
  return kOk;
}

int cmd_fit(const std::string& csv, const std::vector<std::string>& columns, double t_min, double t_max,
            const std::string& model, const std::string& out) {
  const CsvTable tab = read_csv(csv);
  const auto t = tab.column("t");
  ordered_json j = ordered_json::array();
  for (const auto& c : columns) {
    const RateFit f = fit_rate(t, tab.column(c), t_min, t_max, rate_model_from_string(model));
    j.push_back({{"column", c},
                 {"model", to_string(f.model)},
                 {"exponent", f.exponent},
                 {"intercept", f.intercept},
                 {"r_squared", f.r_squared},
                 {"t_min", f.t_min},
                 {"t_max", f.t_max},
                 {"samples", f.samples}});
  }
  emit(j, out);
  return kOk;
}

ordered_json lsi_json(const LogSobolevResult& r) {
  return {{"lhs", r.lhs}, {"rhs", r.rhs}, {"grad_sq", r.grad_sq}, {"h2", r.h2}, {"gated", r.gated},
          {"pass", r.pass}};
}

RealField read_field_csv(const std::string& path, double L) {
  std::istringstream in(read_text(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> r;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
    rows.push_back(std::move(r));
  }
  const int n = static_cast<int>(rows.size());
  for (const auto& r : rows)
    if (static_cast<int>(r.size()) != n) throw DomainError(path + ": field csv must be n rows of n values");
  RealField f(make_grid(n, L));
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) f(i1, i2) = rows[i1][i2];
  return f;
}

int cmd_lsi(const std::string& field, bool gaussian, int random, std::uint64_t seed, int n, double L, double k_cut,
            const std::string& out) {
  ordered_json j;
  bool ok = true;
  if (!field.empty()) {
    const LogSobolevResult r = log_sobolev_check(read_field_csv(field, L));
    j["field"] = lsi_json(r);
    ok = ok && (r.pass || !r.gated);
  }
  if (gaussian) {
    const RealField u = sample<double>(make_grid(n, L), [](double x1, double x2) {
      return std::exp(-0.5 * (x1 * x1 + x2 * x2));
    });
    const LogSobolevResult r = log_sobolev_check(u);
    ordered_json g = lsi_json(r);
    g["analytic_lhs"] = 1.0;
    g["analytic_rhs"] = kLogSobolevConstant * M_PI * std::log(2.0);
    j["gaussian"] = g;
    ok = ok && r.pass;
  }
  if (random > 0) {
    const LogSobolevSuite s = log_sobolev_suite(make_grid(n, L), random, seed, k_cut);
    j["random"] = {{"fields", s.fields},   {"passed", s.passed},
                   {"failed", s.failed},   {"skipped", s.skipped},
                   {"ungated_failures", s.ungated_failures}, {"worst_ratio", s.worst_ratio}};
    ok = ok && s.failed == 0;
  }
  emit(j, out);
  return ok ? kOk : kCheckFailed;
}

int cmd_report(const std::string& run_dir, const std::string& out) {
  const RunArchive arc(run_dir);
  const fs::path dir = out.empty() ? fs::path(run_dir) / "report" : fs::path(out);
  const RunSummary s = write_report(arc, dir);
  std::cout << summary_text(s);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chern-Simons-Higgs simulator and diagnostics harness"};
  app.require_subcommand(1);

  std::string config, out, run_dir, spec = "time", model = "pure_power", field;
  bool flat = false, gaussian = false;
  std::uint64_t seed_value = 1;
  int workers = 1, samples = 40, random = 0, n = 256;
  double t_a = 0.0, t_b = 0.0, t_min = 0.0, t_max = 1e300, h0 = 0.01, margin = 0.05, eps = 0.1, L = 40.0,
         k_cut = 3.0;
  std::vector<int> strides{4, 2, 1};
  std::vector<std::string> columns;

  auto* run = app.add_subcommand("run", "evolve one configuration");
  run->add_option("--config", config, "run config (JSON); defaults when omitted");
  run->add_option("--out", out, "run directory (default run_out)");
  run->add_flag("--flat", flat, "disable the gauge coupling");
  auto* run_seed = run->add_option("--seed", seed_value, "override the seed");

  auto* sweep = app.add_subcommand("sweep", "cartesian sweep over p, amplitude and n");
  sweep->add_option("--config", config, "sweep spec (JSON)")->required();
  sweep->add_option("--out", out, "sweep directory (default sweep_out)");
  sweep->add_option("--workers", workers, "parallel runs")->default_val(1)->check(CLI::PositiveNumber);
  sweep->add_flag("--flat", flat, "disable the gauge coupling");
  auto* sweep_seed = sweep->add_option("--seed", seed_value, "override the seed");

  auto* aud = app.add_subcommand("audit", "Stokes balance of a multiplier over a time window");
  aud->add_option("--run", run_dir, "run directory")->required();
  aud->add_option("--spec", spec, "time, exterior, interior, conformal or exterior_shifted")->required();
  aud->add_option("--t-a", t_a, "window start")->required();
  aud->add_option("--t-b", t_b, "window end")->required();
  aud->add_option("--out", out, "also write the JSON here");

  auto* conf = app.add_subcommand("conformal-check", "conformal map checks and transformed-equation residual");
  conf->add_option("--run", run_dir, "run directory with per-step snapshots");
  conf->add_option("--samples", samples, "image-cone sample points")->default_val(40);
  conf->add_option("--seed", seed_value, "sampling seed");
  conf->add_option("--h0", h0, "stencil step per unit stride")->default_val(0.01);
  conf->add_option("--strides", strides, "snapshot strides, coarse to fine")->delimiter(',');
  conf->add_option("--margin", margin, "distance from the cone boundary")->default_val(0.05);
  conf->add_option("--eps", eps, "exponent slack of the normalized bound")->default_val(0.1);
  conf->add_option("--out", out, "also write the JSON here");

  auto* fit = app.add_subcommand("fit-rates", "power-law fits of CSV columns");
  fit->add_option("--csv", field, "CSV with a t column")->required();
  fit->add_option("--column", columns, "columns to fit")->required();
  fit->add_option("--t-min", t_min, "window start");
  fit->add_option("--t-max", t_max, "window end");
  fit->add_option("--model", model, "pure_power or power_with_sqrt_log");
  fit->add_option("--out", out, "also write the JSON here");

  auto* lsi = app.add_subcommand("check-logsobolev", "logarithmic Sobolev inequality checks");
  std::string lsi_field;
  lsi->add_option("--field", lsi_field, "n x n CSV of samples on [-L/2, L/2)^2");
  lsi->add_flag("--gaussian", gaussian, "closed-form Gaussian case");
  lsi->add_option("--random", random, "number of seeded random band-limited fields");
  lsi->add_option("--seed", seed_value, "first seed");
  lsi->add_option("--n", n, "grid points per side")->default_val(256);
  lsi->add_option("--L", L, "box length")->default_val(40.0);
  lsi->add_option("--k-cut", k_cut, "wavenumber cutoff of random fields")->default_val(3.0);
  lsi->add_option("--out", out, "also write the JSON here");

  auto* rep = app.add_subcommand("report", "verdict summary and CSV extracts of a run");
  rep->add_option("--run", run_dir, "run directory")->required();
  rep->add_option("--out", out, "report directory (default <run>/report)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config, out.empty() ? "run_out" : out, flat, run_seed->count() ? std::optional(seed_value) : std::nullopt);
    if (sweep->parsed())
      return cmd_sweep(config, out.empty() ? "sweep_out" : out, workers, flat, sweep_seed->count() ? std::optional(seed_value) : std::nullopt);
    if (aud->parsed()) return cmd_audit(run_dir, spec, t_a, t_b, out);
    if (conf->parsed()) return cmd_conformal(run_dir, samples, seed_value, h0, strides, margin, eps, out);
    if (fit->parsed()) return cmd_fit(field, columns, t_min, t_max, model, out);
    if (lsi->parsed()) return cmd_lsi(lsi_field, gaussian, random, seed_value, n, L, k_cut, out);
    if (rep->parsed()) return cmd_report(run_dir, out);
  } catch (const ConfigError& e) {
    return fail_json(kConfig, "config", e.what(), e.issues);
  } catch (const DomainError& e) {
    return fail_json(kError, "domain", e.what());
  } catch (const IoError& e) {
    return fail_json(kError, "io", e.what());
  } catch (const std::exception& e) {
    return fail_json(kError, "internal", e.what());
  }
  return kError;
}
