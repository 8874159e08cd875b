#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "csh/gauge.hpp"

namespace csh {

class RunArchive;

enum class Region { slab, exterior_halfspace, interior_halfspace };

std::string to_string(Region r);

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

// A multiplier (X, chi) with analytic derivative data.  X holds the upper
// components (X^0, X^1, X^2); dchi and pi are lower-index (d_mu chi and
// pi_{mu nu} = (d_mu X_nu + d_nu X_mu)/2).
struct MultiplierSpec {
  std::string name;
  Region region = Region::slab;
  std::function<Vec3(double, double, double)> X;
  std::function<double(double, double, double)> chi;
  std::function<Vec3(double, double, double)> dchi;
  std::function<Mat3(double, double, double)> pi;
  std::function<double(double, double, double)> box_chi;
};

// time, exterior, interior, conformal; q = (p-1)/2 enters the interior entry.
std::vector<MultiplierSpec> catalog(double p);
// The catalog plus the alternate exterior weight x2^2 + (t-x1)^2 + 1.
std::vector<MultiplierSpec> extended_catalog(double p);
MultiplierSpec find_spec(const std::string& name, double p);

// Max over random points of the difference between spec.pi and a centered
// finite-difference deformation tensor of spec.X, relative to 1 + |pi|.
// Points are drawn from the spec's region.
double deformation_consistency(const MultiplierSpec& spec, unsigned seed, int points = 64);

// Pointwise energy-momentum tensor T_{mu nu} (lower indices).
Mat3 energy_momentum(const cplx& phi, const cplx& psi, const cplx& d1, const cplx& d2, double p);

// Densities on the grid.  P_0 = T_{0 nu} X^nu - (1/2) d_t chi |phi|^2 +
// chi Re(conj(phi) psi); bulk = T^{mu nu} pi_{mu nu} + chi(<D_mu phi, D^mu phi>
// + |phi|^{p+1}) - (1/2) box chi |phi|^2.  Zero outside the spec's region.
RealField p0_density(const FieldState& s, const GaugeSolution& G, const MultiplierSpec& spec);
RealField bulk_density(const FieldState& s, const GaugeSolution& G, const MultiplierSpec& spec);

// Integral of a density over the spec's region at time s.t.
double region_integral(const RealField& f, const MultiplierSpec& spec, double t);

// Null-plane line integrals over x2 at x1 = t:
//   tl  = integral of T_{L1 nu} X^nu - (L1 chi) |phi|^2
//   chi = integral of chi |phi|^2
struct NullPlaneTerms {
  double tl = 0.0;
  double chi = 0.0;
};
NullPlaneTerms null_plane_terms(const FieldState& s, const GaugeSolution& G, const MultiplierSpec& spec);

// Max over the grid of |X^nu F_{gamma nu} J^gamma| relative to its scale.
double cs_force_relative(const Current& J, const MultiplierSpec& spec, double t);

// (2 - q) u1^{q-3} |x2 D_L1 phi + u1 D_2 phi|^2 on {x1 <= t}.
RealField interior_bulk_closed_form(const FieldState& s, const GaugeSolution& G, double p);

struct AuditReport {
  std::string spec;
  Region region = Region::slab;
  double t_a = 0.0, t_b = 0.0;
  int samples = 0;
  double boundary_a = 0.0;   // integral of P_0 over the region at t_a
  double boundary_b = 0.0;
  double bulk = 0.0;         // time-trapezoid of the bulk integral
  double null_tl = 0.0;      // time-trapezoid of NullPlaneTerms::tl
  double null_chi_a = 0.0;
  double null_chi_b = 0.0;
  double null_total = 0.0;   // null_tl + (null_chi_b - null_chi_a)/2
  double residual = 0.0;     // signed, see multipliers.cpp
  double scale = 0.0;
  double relative = 0.0;     // |residual| / scale
  double bulk_min = 0.0;     // min of the pointwise bulk over samples
  double cs_force = 0.0;     // max relative dropped gauge term over samples
};

AuditReport audit_slab(const RunArchive& run, const MultiplierSpec& spec, double t_a, double t_b);
AuditReport audit_halfspace(const RunArchive& run, const MultiplierSpec& spec, double t_a, double t_b);
AuditReport audit(const RunArchive& run, const MultiplierSpec& spec, double t_a, double t_b);

}  // namespace csh
