#include "csh/state.hpp"

#include <cmath>

namespace csh {

FieldState make_state(GridPtr g, double p, double t) {
  FieldState s;
  s.t = t;
  s.p = p;
  s.phi = ComplexField(g);
  s.psi = ComplexField(std::move(g));
  return s;
}

void validate(const FieldState& s) {
  if (s.phi.empty() || s.psi.empty()) throw DomainError("state: empty fields");
  require_same_grid(s.phi.grid(), s.psi.grid(), "state");
  if (!(s.p > 1.0)) throw DomainError("state: p must exceed 1");
  require_finite(s.phi, "state.phi");
  require_finite(s.psi, "state.psi");
}

double GaugePotential::value(int mu, double x1, double x2, std::size_t k) const {
  switch (mu) {
    case 0: return a0[k] + bg.a0(x1, x2);
    case 1: return a1[k] + bg.a1(x1, x2);
    case 2: return a2[k] + bg.a2(x1, x2);
  }
  throw DomainError("gauge potential: index out of range");
}

RealField GaugePotential::full(int mu) const {
  const RealField& base = mu == 0 ? a0 : mu == 1 ? a1 : a2;
  RealField out = base;
  const Grid2D& g = base.grid();
  const int n = g.n();
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = g.coord(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const double x2 = g.coord(i2);
      const double b = mu == 0 ? bg.a0(x1, x2) : mu == 1 ? bg.a1(x1, x2) : bg.a2(x1, x2);
      out(i1, i2) += b;
    }
  }
  return out;
}

RealField GaugePotential::derivative(int mu, Axis axis) const {
  const RealField& base = mu == 0 ? a0 : mu == 1 ? a1 : a2;
  RealField d = spectral_derivative(base, axis);
  double c = 0.0;
  if (mu == 0) c = axis == Axis::x1 ? bg.d1a0() : bg.d2a0();
  if (mu == 1) c = axis == Axis::x2 ? bg.d2a1() : 0.0;
  if (mu == 2) c = axis == Axis::x1 ? bg.d1a2() : 0.0;
  if (c != 0.0)
    for (auto& v : d.values()) v += c;
  return d;
}

GaugePotential zero_potential(const GridPtr& g) {
  GaugePotential A;
  A.a0 = RealField(g);
  A.a1 = RealField(g);
  A.a2 = RealField(g);
  return A;
}

ComplexField covariant_derivative(const FieldState& s, const GaugePotential& A, int mu) {
  require_same_grid(s.phi.grid(), A.a1.grid(), "covariant_derivative");
  if (mu == 0) return s.psi;
  if (mu != 1 && mu != 2) throw DomainError("covariant_derivative: mu must be 0, 1 or 2");
  ComplexField d = spectral_derivative(s.phi, mu == 1 ? Axis::x1 : Axis::x2);
  const RealField a = A.full(mu);
  for (std::size_t k = 0; k < d.size(); ++k) d[k] += cplx(0.0, a[k]) * s.phi[k];
  return d;
}

ComplexField covariant_derivative(const ComplexField& f, const RealField& a_full, Axis axis) {
  require_same_grid(f.grid(), a_full.grid(), "covariant_derivative");
  ComplexField d = spectral_derivative(f, axis);
  for (std::size_t k = 0; k < d.size(); ++k) d[k] += cplx(0.0, a_full[k]) * f[k];
  return d;
}

Current compute_current(const FieldState& s, const GaugePotential& A) {
  require_same_grid(s.phi.grid(), A.a1.grid(), "compute_current");
  const GridPtr& g = s.grid_ptr();
  Current J{RealField(g), RealField(g), RealField(g)};
  const ComplexField d1 = spectral_derivative(s.phi, Axis::x1);
  const ComplexField d2 = spectral_derivative(s.phi, Axis::x2);
  const RealField a1 = A.full(1);
  const RealField a2 = A.full(2);
  for (std::size_t k = 0; k < J.j0.size(); ++k) {
    const cplx ph = s.phi[k];
    const double rho = std::norm(ph);
    J.j0[k] = (ph * std::conj(s.psi[k])).imag();
    J.j1[k] = (ph * std::conj(d1[k])).imag() - a1[k] * rho;
    J.j2[k] = (ph * std::conj(d2[k])).imag() - a2[k] * rho;
  }
  return J;
}

Curvature build_curvature_from_current(const Current& J) {
  // F_{mu nu} = eps_{mu nu gamma} J^gamma, J^0 = -J_0, J^j = J_j:
  //   F01 = eps_012 J^2 = J_2, F02 = eps_021 J^1 = -J_1, F12 = eps_120 J^0 = -J_0.
  Curvature F{J.j2, J.j1, J.j0};
  for (auto& v : F.f02.values()) v = -v;
  for (auto& v : F.f12.values()) v = -v;
  return F;
}

ForceResidual chern_simons_force(const Current& J, const VectorFieldFn& X, double t) {
  const Curvature F = build_curvature_from_current(J);
  const Grid2D& g = J.j0.grid();
  const int n = g.n();
  ForceResidual r;
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = g.coord(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const std::size_t k = g.index(i1, i2);
      const auto x = X(t, x1, g.coord(i2));
      const double f01 = F.f01[k], f02 = F.f02[k], f12 = F.f12[k];
      const double Fm[3][3] = {{0.0, f01, f02}, {-f01, 0.0, f12}, {-f02, -f12, 0.0}};
      const double Jup[3] = {-J.j0[k], J.j1[k], J.j2[k]};
      double acc = 0.0;
      for (int gam = 0; gam < 3; ++gam)
        for (int nu = 0; nu < 3; ++nu) acc += x[nu] * Fm[gam][nu] * Jup[gam];
      const double jj = J.j0[k] * J.j0[k] + J.j1[k] * J.j1[k] + J.j2[k] * J.j2[k];
      const double xx = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
      r.max_abs = std::max(r.max_abs, std::abs(acc));
      r.scale = std::max(r.scale, jj * xx);
    }
  }
  return r;
}

}  // namespace csh
