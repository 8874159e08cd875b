#include "csh/dynamics.hpp"

#include <fftw3.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>

#include "csh/config.hpp"
#include "csh/diagnostics.hpp"
#include "csh/io.hpp"
#include "csh/multipliers.hpp"

namespace csh {

namespace fs = std::filesystem;

namespace {

inline cplx power_term(const cplx& phi, double p) {
  const double m2 = std::norm(phi);
  if (p == 3.0) return m2 * phi;
  if (p == 5.0) return m2 * m2 * phi;
  return std::pow(m2, 0.5 * (p - 1.0)) * phi;
}

void require_finite_rate(const StateRate& r, double t) {
  for (const ComplexField* f : {&r.dphi, &r.dpsi})
    for (const cplx& v : f->values())
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw BlowupError("blowup/instability: non-finite time derivative at t = " + format_double(t), t);
}

StateRate rhs_from_gauge(const FieldState& s, const GaugeSolution& G, const EvolutionOptions& opt) {
  const GridPtr& gp = s.grid_ptr();
  const std::size_t N = gp->size();
  const double p = s.p;

  ComplexField lap = G.phi_hat;
  apply_laplacian(lap);
  lap = from_spectrum_complex(std::move(lap));

  ComplexField prod_psi(gp);
  const cplx I(0.0, 1.0);
  if (opt.flat) {
    if (opt.nonlinear)
      for (std::size_t k = 0; k < N; ++k) prod_psi[k] = -power_term(s.phi[k], p);
  } else {
    for (std::size_t k = 0; k < N; ++k) {
      const double a0 = G.a0[k], a1 = G.a1[k], a2 = G.a2[k];
      const cplx ph = s.phi[k];
      cplx v = 2.0 * I * (a1 * G.d1phi[k] + a2 * G.d2phi[k]) - (a1 * a1 + a2 * a2) * ph - I * a0 * s.psi[k];
      if (opt.nonlinear) v -= power_term(ph, p);
      prod_psi[k] = v;
    }
  }

  StateRate r;
  r.dphi = s.psi;
  if (!opt.flat) {
    ComplexField prod_phi(gp);
    for (std::size_t k = 0; k < N; ++k) prod_phi[k] = -I * G.a0[k] * s.phi[k];
    if (opt.dealias) prod_phi = dealias(prod_phi);
    for (std::size_t k = 0; k < N; ++k) r.dphi[k] += prod_phi[k];
  }
  if (opt.dealias) prod_psi = dealias(prod_psi);
  r.dpsi = std::move(lap);
  for (std::size_t k = 0; k < N; ++k) r.dpsi[k] += prod_psi[k];
  require_finite_rate(r, s.t);
  return r;
}

GaugeSolution gauge_or_blowup(const FieldState& s, const EvolutionOptions& opt) {
  try {
    return solve_gauge_detailed(s, opt.flat);
  } catch (const NonFiniteError& e) {
    throw BlowupError(std::string("blowup/instability: ") + e.what() + " at t = " + format_double(s.t), s.t);
  }
}

FieldState axpy(const FieldState& s, double h, const StateRate& k) {
  FieldState out = s;
  for (std::size_t i = 0; i < out.phi.size(); ++i) {
    out.phi[i] += h * k.dphi[i];
    out.psi[i] += h * k.dpsi[i];
  }
  return out;
}

FieldState rk4_from_k1(const FieldState& s, double dt, const EvolutionOptions& opt, const StateRate& k1) {
  FieldState s2 = axpy(s, 0.5 * dt, k1);
  s2.t = s.t + 0.5 * dt;
  const StateRate k2 = rhs(s2, opt);
  FieldState s3 = axpy(s, 0.5 * dt, k2);
  s3.t = s2.t;
  const StateRate k3 = rhs(s3, opt);
  FieldState s4 = axpy(s, dt, k3);
  s4.t = s.t + dt;
  const StateRate k4 = rhs(s4, opt);
  FieldState out = s;
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < out.phi.size(); ++i) {
    out.phi[i] += w * (k1.dphi[i] + 2.0 * k2.dphi[i] + 2.0 * k3.dphi[i] + k4.dphi[i]);
    out.psi[i] += w * (k1.dpsi[i] + 2.0 * k2.dpsi[i] + 2.0 * k3.dpsi[i] + k4.dpsi[i]);
  }
  out.t = s.t + dt;
  return out;
}

}  // namespace

StateRate rhs(const FieldState& s, const EvolutionOptions& opt, GaugeSolution* gauge) {
  GaugeSolution G = gauge_or_blowup(s, opt);
  StateRate r = rhs_from_gauge(s, G, opt);
  if (gauge) *gauge = std::move(G);
  return r;
}

FieldState rk4_step(const FieldState& s, double dt, const EvolutionOptions& opt, GaugeSolution* gauge_at_start) {
  const StateRate k1 = rhs(s, opt, gauge_at_start);
  return rk4_from_k1(s, dt, opt, k1);
}

StepPlan plan_steps(double t_final, double cfl, double dx) {
  StepPlan p;
  if (t_final <= 0.0) return p;
  p.steps = static_cast<int>(std::ceil(t_final / (cfl * dx) - 1e-9));
  if (p.steps < 1) p.steps = 1;
  p.dt = t_final / p.steps;
  return p;
}

void validate(const RunConfig& c) {
  if (c.n < 32 || (c.n & (c.n - 1)) != 0) throw DomainError("grid.n must be a power of two >= 32");
  if (!(c.L > 0.0) || !std::isfinite(c.L)) throw DomainError("grid.L must be positive");
  if (!(c.p > 1.0) || !std::isfinite(c.p)) throw DomainError("p must exceed 1");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw DomainError("cfl must lie in (0, 1]");
  if (!(c.t_final >= 0.0) || !std::isfinite(c.t_final)) throw DomainError("t_final must be finite and >= 0");
  if (c.snapshot_every < 0) throw DomainError("snapshot_every must be >= 0");
  if (c.diag_every < 1) throw DomainError("diag_every must be >= 1");
  validate(c.data);
  const double R = c.data.support_radius();
  const double need = 2.0 * (c.t_final + R + kSupportMargin);
  if (c.L < need)
    throw DomainError("wraparound guard: L = " + format_double(c.L) + " < 2(t_final + R_support + 2) = " +
                      format_double(need));
}

namespace {

struct PendingRecord {
  DiagnosticsRecord rec;
  FieldState state;
  GaugePotential A;
  GaugePotential A_prev;
};

void fill_temporal(DiagnosticsRecord& r, const FieldState& s, const GaugePotential& A, const GaugePotential& prev,
                   const GaugePotential* next, double dt) {
  const TemporalNeighbors tn{&prev, next, dt};
  const ConstraintResiduals c = constraint_residuals(s, A, &tn);
  r.res_temporal01 = c.temporal01;
  r.res_temporal02 = c.temporal02;
  r.temporal_kind = next ? "centered" : "backward";
}

std::string null_header(const std::vector<MultiplierSpec>& specs) {
  std::string h = "t,e2,e1";
  for (const auto& s : specs) h += ",tl_" + s.name + ",chi_" + s.name;
  return h;
}

std::string null_row(const FieldState& s, const GaugeSolution& G, const NullLineSample& ns,
                     const std::vector<MultiplierSpec>& specs) {
  std::string row = format_double(s.t) + "," + format_double(ns.e2) + "," + format_double(ns.e1);
  for (const auto& sp : specs) {
    const NullPlaneTerms nt = null_plane_terms(s, G, sp);
    row += "," + format_double(nt.tl) + "," + format_double(nt.chi);
  }
  return row;
}

}  // namespace

RunResult run(const RunConfig& cfg_in, const fs::path& out_dir) {
  RunConfig cfg = cfg_in;
  cfg.data.seed = cfg.seed;
  validate(cfg);
  const auto wall0 = std::chrono::steady_clock::now();

  fs::create_directories(out_dir / "snapshots");
  for (const auto& e : fs::directory_iterator(out_dir / "snapshots")) fs::remove(e.path());

  const GridPtr g = make_grid(cfg.n, cfg.L);
  const EvolutionOptions opt{cfg.flat, cfg.nonlinear, true};
  const StepPlan plan = plan_steps(cfg.t_final, cfg.cfl, g->dx());
  const std::vector<MultiplierSpec> force_specs = catalog(cfg.p);
  const std::vector<MultiplierSpec> null_specs = extended_catalog(cfg.p);
  const DiagnosticToggles& tg = cfg.toggles;
  const RecordOptions ropt{tg.conformal, tg.weighted, tg.second_energy};

  std::ofstream diag(out_dir / "diagnostics.csv", std::ios::binary);
  if (!diag) throw IoError((out_dir / "diagnostics.csv").string() + ": cannot open for writing");
  diag << csv_header() << '\n';
  write_text(out_dir / "diagnostics_schema.txt", schema_text());
  std::ofstream nulls;
  if (tg.null_flux) {
    nulls.open(out_dir / "null_series.csv", std::ios::binary);
    if (!nulls) throw IoError((out_dir / "null_series.csv").string() + ": cannot open for writing");
    nulls << null_header(null_specs) << '\n';
  } else if (fs::exists(out_dir / "null_series.csv")) {
    fs::remove(out_dir / "null_series.csv");
  }

  RunResult result;
  result.status = "completed";
  NullFluxAccumulators acc;
  std::vector<std::string> snapshot_files;
  int step = 0;

  FieldState s = build_data(cfg.data, g, cfg.p);
  result.norms = energy_norms(s, 1, cfg.flat);
  const double sup0 = max_abs(s.phi);

  try {
    GaugeSolution G = gauge_or_blowup(s, opt);
    std::optional<PendingRecord> pending;
    std::optional<GaugePotential> A_prev;
    NullLineSample prev_sample;
    for (step = 0;; ++step) {
      if (tg.null_flux) {
        const NullLineSample ns = null_line_sample(s, G);
        if (step > 0) null_flux_accumulate(prev_sample, ns, acc);
        if (ns.valid) nulls << null_row(s, G, ns, null_specs) << '\n';
        prev_sample = ns;
      }
      if (pending) {
        fill_temporal(pending->rec, pending->state, pending->A, pending->A_prev, &G.A, plan.dt);
        diag << csv_row(pending->rec) << '\n';
        pending.reset();
      }

      const bool last = step == plan.steps;
      if (step % cfg.diag_every == 0 || last) {
        DiagnosticsRecord rec = compute_record(s, G, step, ropt);
        rec.flux_null = acc.flux_null;
        rec.flux_null_weighted = acc.flux_null_weighted;
        if (tg.constraints) {
          const ConstraintResiduals c = constraint_residuals(s, G.A);
          rec.res_coulomb = c.coulomb;
          rec.res_spatial = c.spatial;
        }
        if (tg.cs_force)
          for (const auto& sp : force_specs) rec.cs_force = std::max(rec.cs_force, cs_force_relative(G.J, sp, s.t));
        if (tg.temporal && A_prev && !last) {
          pending = PendingRecord{rec, s, G.A, *A_prev};
        } else {
          if (tg.temporal && A_prev && last) fill_temporal(rec, s, G.A, *A_prev, nullptr, plan.dt);
          diag << csv_row(rec) << '\n';
        }
      }

      const bool snap = cfg.snapshot_every > 0 ? (step % cfg.snapshot_every == 0 || last) : (step == 0 || last);
      if (snap) {
        const std::string name = snapshot_name(step);
        write_snapshot(out_dir / "snapshots" / name, s);
        snapshot_files.push_back("snapshots/" + name);
      }
      if (sup0 > 0.0 && max_abs(s.phi) > 1e6 * sup0)
        throw BlowupError("blowup/instability: |phi| exceeded 1e6 times its initial maximum at t = " +
                              format_double(s.t),
                          s.t);
      if (last) break;

      const StateRate k1 = rhs_from_gauge(s, G, opt);
      A_prev = G.A;
      s = rk4_from_k1(s, plan.dt, opt, k1);
      s.t = (step + 1 == plan.steps) ? cfg.t_final : (step + 1) * plan.dt;
      G = gauge_or_blowup(s, opt);
    }
    result.steps = plan.steps;
    result.t_end = s.t;
  } catch (const BlowupError& e) {
    result.status = "failed";
    result.failure = e.what();
    result.steps = step;
    result.t_end = e.time;
  }
  diag.flush();
  if (nulls.is_open()) nulls.flush();

  nlohmann::ordered_json m;
  m["status"] = result.status;
  m["config"] = to_json(cfg);
  m["versions"] = {{"artifact", "1.0.0"},
                   {"config", kConfigVersion},
                   {"snapshot", kSnapshotVersion},
                   {"fftw", std::string(fftw_version)}};
  m["steps"] = result.steps;
  m["dt"] = plan.dt;
  m["t_end"] = result.t_end;
  m["energy_norms"] = {{"e00", result.norms.e00}, {"e02", result.norms.e02}, {"e10", result.norms.e10}};
  m["null_flux"] = {{"enabled", tg.null_flux},
                    {"cutoff", acc.stopped ? nlohmann::ordered_json(acc.cutoff) : nlohmann::ordered_json(nullptr)}};
  m["failure"] = result.failure.empty()
                     ? nlohmann::ordered_json(nullptr)
                     : nlohmann::ordered_json{{"reason", result.failure}, {"time", result.t_end}};
  m["files"] = {{"diagnostics", "diagnostics.csv"},
                {"schema", "diagnostics_schema.txt"},
                {"null_series", tg.null_flux ? nlohmann::ordered_json("null_series.csv") : nlohmann::ordered_json(nullptr)},
                {"snapshots", snapshot_files}};
  write_json(out_dir / "manifest.json", m);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  nlohmann::ordered_json tj;
  tj["wall_seconds"] = wall;
  write_json(out_dir / "timing.json", tj);
  return result;
}

}  // namespace csh
