#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "csh/gauge.hpp"
#include "csh/initdata.hpp"

namespace csh {

// Non-finite values or runaway growth during evolution.
struct BlowupError : Error {
  BlowupError(const std::string& what, double t) : Error(what), time(t) {}
  double time;
};

struct EvolutionOptions {
  bool flat = false;       // A forced to zero
  bool nonlinear = true;   // |phi|^{p-1} phi term
  bool dealias = true;     // 2/3 rule on products
};

struct StateRate {
  ComplexField dphi, dpsi;
};

// Time derivative of (phi, psi).  When gauge is non-null it receives the
// Coulomb solution of s.
StateRate rhs(const FieldState& s, const EvolutionOptions& opt = {}, GaugeSolution* gauge = nullptr);

// Classical RK4 with the gauge re-solved in every stage.  gauge_at_start
// receives the solution of the first stage, i.e. of s itself.
FieldState rk4_step(const FieldState& s, double dt, const EvolutionOptions& opt = {},
                    GaugeSolution* gauge_at_start = nullptr);

struct StepPlan {
  int steps = 0;
  double dt = 0.0;
};

// Uniform steps of size at most cfl*dx landing exactly on t_final.
StepPlan plan_steps(double t_final, double cfl, double dx);

struct DiagnosticToggles {
  bool constraints = true;
  bool temporal = true;
  bool conformal = true;
  bool weighted = true;
  bool second_energy = true;
  bool null_flux = true;
  bool cs_force = true;
};

struct RunConfig {
  double p = 3.0;
  int n = 256;
  double L = 40.0;
  double cfl = 0.25;
  double t_final = 10.0;
  int snapshot_every = 0;  // 0: first and last step only
  int diag_every = 1;
  InitialDataSpec data;
  DiagnosticToggles toggles;
  std::uint64_t seed = 1;
  bool flat = false;
  bool nonlinear = true;
};

// Throws DomainError naming the offending field.
void validate(const RunConfig& cfg);

struct RunResult {
  std::string status;  // "completed" or "failed"
  std::string failure;
  int steps = 0;
  double t_end = 0.0;
  EnergyNorms norms;
};

// Evolves the configured data and writes manifest.json, diagnostics.csv,
// diagnostics_schema.txt, null_series.csv, timing.json and snapshots/ under
// out_dir, which is created if needed.
RunResult run(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace csh
