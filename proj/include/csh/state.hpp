#pragma once

#include <array>
#include <functional>

#include "csh/grid.hpp"

namespace csh {

struct FieldState {
  double t = 0.0;
  double p = 3.0;
  ComplexField phi;
  ComplexField psi;  // D_0 phi

  const GridPtr& grid_ptr() const { return phi.grid_ptr(); }
  const Grid2D& grid() const { return phi.grid(); }
};

FieldState make_state(GridPtr g, double p, double t = 0.0);
void validate(const FieldState& s);

// Affine part of the potential carrying the mean of the current on the torus:
//   A1 = (J0bar x2 - s2)/2,  A2 = -(J0bar x1 - s1)/2,  A0 = (-m2 x1 + m1 x2)/2,
// with J0bar the mean of J0, s_j = (integral of x_j J0)/L^2 and m_j the mean
// of J_j.  It is divergence free and carries the zero Fourier modes of
// F12 = -J0 and F0j = (J2, -J1) that no periodic potential can.
struct GaugeBackground {
  double j0_mean = 0.0;
  double s1 = 0.0, s2 = 0.0;
  double m1 = 0.0, m2 = 0.0;

  double a0(double x1, double x2) const { return 0.5 * (-m2 * x1 + m1 * x2); }
  double a1(double, double x2) const { return 0.5 * (j0_mean * x2 - s2); }
  double a2(double x1, double) const { return -0.5 * (j0_mean * x1 - s1); }
  // Constant gradients d_j a_mu.
  double d1a0() const { return -0.5 * m2; }
  double d2a0() const { return 0.5 * m1; }
  double d2a1() const { return 0.5 * j0_mean; }
  double d1a2() const { return -0.5 * j0_mean; }
};

// A_mu = periodic part (zero mean) + affine background.
struct GaugePotential {
  RealField a0, a1, a2;
  GaugeBackground bg;

  double value(int mu, double x1, double x2, std::size_t k) const;
  RealField full(int mu) const;
  // Spatial derivative d_axis A_mu of the full potential.
  RealField derivative(int mu, Axis axis) const;
};

GaugePotential zero_potential(const GridPtr& g);

struct Current {
  RealField j0, j1, j2;
};

struct Curvature {
  RealField f01, f02, f12;
};

ComplexField covariant_derivative(const FieldState& s, const GaugePotential& A, int mu);

// D_axis f = d_axis f + i a f for any complex field f, with a the full
// (periodic plus background) component A_axis sampled on the grid.
ComplexField covariant_derivative(const ComplexField& f, const RealField& a_full, Axis axis);

Current compute_current(const FieldState& s, const GaugePotential& A);

// F_{mu nu} = eps_{mu nu gamma} J^gamma with eps_{012} = 1 and J^0 = -J_0.
Curvature build_curvature_from_current(const Current& J);

using VectorFieldFn = std::function<std::array<double, 3>(double t, double x1, double x2)>;

struct ForceResidual {
  double max_abs = 0.0;
  double scale = 0.0;  // max of |J|^2 |X|
};

// max over the grid of |X^nu F_{gamma nu} J^gamma|.
ForceResidual chern_simons_force(const Current& J, const VectorFieldFn& X, double t);

}  // namespace csh
