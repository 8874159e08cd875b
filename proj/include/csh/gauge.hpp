#pragma once

#include "csh/state.hpp"

namespace csh {

// Everything the Coulomb solve produces along the way, kept so that the
// stepper and the diagnostics do not recompute spectra.
struct GaugeSolution {
  GaugePotential A;
  RealField a0, a1, a2;  // full values on the grid
  ComplexField phi_hat;  // unnormalized spectrum of phi
  ComplexField d1phi, d2phi;
  Current J;
};

// Coulomb gauge, solved in the triangular order J0 -> (A1, A2) -> (J1, J2) -> A0.
// With flat = true the potential is forced to zero.
GaugeSolution solve_gauge_detailed(const FieldState& s, bool flat = false);
GaugePotential solve_gauge(const FieldState& s, bool flat = false);

struct TemporalNeighbors {
  const GaugePotential* prev = nullptr;
  const GaugePotential* next = nullptr;  // optional; centered difference when present
  double dt = 0.0;
};

struct ConstraintResiduals {
  double coulomb = 0.0;         // |d1 A1 + d2 A2|
  double spatial = 0.0;         // |(d1 A2 - d2 A1) + J0|
  double temporal01 = 0.0;      // |dt A1 - d1 A0 - J2|
  double temporal02 = 0.0;      // |dt A2 - d2 A0 + J1|
  bool has_temporal = false;
  bool centered = false;
  double field_scale = 0.0;     // max |J_mu|
  double potential_scale = 0.0; // max |A_j|
};

// Residuals of the gauge condition and of F = eps J.  Passing a
// TemporalNeighbors without prev throws.
ConstraintResiduals constraint_residuals(const FieldState& s, const GaugePotential& A,
                                         const TemporalNeighbors* temporal = nullptr);

}  // namespace csh
