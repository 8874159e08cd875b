#pragma once

#include <array>
#include <string>
#include <vector>

#include "csh/gauge.hpp"

namespace csh {

struct DiagnosticsRecord {
  double t = 0.0;
  int step = 0;
  double energy = 0.0;
  double charge = 0.0;
  double potential = 0.0;
  double weighted_potential = 0.0;
  double conf_total = 0.0;
  std::array<double, 4> q_parts{};
  double sup_phi = 0.0;
  double sup_phi_inner = 0.0;
  double sup_weighted = 0.0;
  double second_energy = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  double phi_l2 = 0.0;
  double flux_null = 0.0;
  double flux_null_weighted = 0.0;
  double res_coulomb = 0.0;
  double res_spatial = 0.0;
  double res_temporal01 = 0.0;
  double res_temporal02 = 0.0;
  std::string temporal_kind = "none";  // none, centered, backward
  double field_scale = 0.0;
  double cs_force = 0.0;  // max over the multiplier catalog, relative to its scale
};

// Column names in CSV order, with one-line descriptions for the schema file.
const std::vector<std::pair<std::string, std::string>>& diagnostics_columns();
std::string csv_header();
std::string csv_row(const DiagnosticsRecord& r);
std::string schema_text();

// Integrands share the covariant derivatives held by the gauge solution.
struct CovariantFields {
  ComplexField d1, d2;  // D_1 phi, D_2 phi
};
CovariantFields covariant_fields(const FieldState& s, const GaugeSolution& G);

double standard_energy(const FieldState& s, const GaugeSolution& G);
double charge(const FieldState& s);

struct ConformalCharge {
  double total = 0.0;
  double potential_part = 0.0;   // integral of (t^2 + r^2)/(p+1) |phi|^{p+1}
  std::array<double, 4> q{};     // the four halves of Q: D_S+1, x1 row, x2 row, D_Omega
};
ConformalCharge conformal_charge(const FieldState& s, const GaugeSolution& G);

struct PotentialDecay {
  double potential = 0.0;
  double weighted = 0.0;
};
// Weight (1+t+r)^{min((p-1)/2, 2)} inside the weighted integral.
PotentialDecay potential_and_decay(const FieldState& s);
double decay_weight_exponent(double p);

struct WeightedFirstOrder {
  double w1 = 0.0;      // |(1+|t-r|) Dbar phi|_2
  double w2 = 0.0;      // (1+t) |r^{-1} D_Omega phi|_2
  double phi_l2 = 0.0;  // |phi|_2
};
WeightedFirstOrder weighted_first_order(const FieldState& s, const GaugeSolution& G);

// Root-sum-square of |D_j D_k phi|_2 over j, k in {1, 2} and |D_j psi|_2.
double second_order_energy(const FieldState& s, const GaugeSolution& G);

struct PointwiseTrackers {
  double sup_phi = 0.0;
  double sup_phi_inner = 0.0;  // over |x| <= t/2
  double sup_weighted = 0.0;   // max |phi| (1+t+r)^{1/2}
};
PointwiseTrackers pointwise_trackers(const FieldState& s);

// Line integrals over x2 at x1 = t of the null-plane energy and weighted flux densities.
struct NullLineSample {
  double t = 0.0;
  bool valid = false;   // false once x1 = t leaves the box
  double e2 = 0.0;      // |D_L1 phi|^2 + |D_2 phi|^2 + 2/(p+1) |phi|^{p+1}
  double e1 = 0.0;      // x2^2 |D_L1 phi|^2
};
NullLineSample null_line_sample(const FieldState& s, const GaugeSolution& G);

struct NullFluxAccumulators {
  double flux_null = 0.0;
  double flux_null_weighted = 0.0;
  bool stopped = false;
  double cutoff = 0.0;  // time at which accumulation stopped, if stopped
};

// Trapezoid in t between two consecutive samples.
void null_flux_accumulate(const NullLineSample& prev, const NullLineSample& next,
                          NullFluxAccumulators& acc);
void null_flux_accumulate(const FieldState& prev, const GaugeSolution& Gprev, const FieldState& next,
                          const GaugeSolution& Gnext, NullFluxAccumulators& acc);

struct RecordOptions {
  bool conformal = true;
  bool weighted = true;
  bool second_energy = true;
};

// Fills every observable that depends only on the state at one time.
DiagnosticsRecord compute_record(const FieldState& s, const GaugeSolution& G, int step,
                                 const RecordOptions& opt = {});

}  // namespace csh
