#include "csh/gauge.hpp"

#include <algorithm>
#include <cmath>

namespace csh {

namespace {

// Split the spectrum Z of a + ib (a, b real) into the spectra of a and b.
void unpack_real_pair(const ComplexField& Z, ComplexField& ahat, ComplexField& bhat) {
  const Grid2D& g = Z.grid();
  const int n = g.n();
  for (int m1 = 0; m1 < n; ++m1) {
    const int r1 = (n - m1) % n;
    for (int m2 = 0; m2 < n; ++m2) {
      const int r2 = (n - m2) % n;
      const cplx z = Z(m1, m2);
      const cplx zr = std::conj(Z(r1, r2));
      ahat(m1, m2) = 0.5 * (z + zr);
      bhat(m1, m2) = cplx(0.0, -0.5) * (z - zr);
    }
  }
}

double moment(const RealField& f, int axis) {
  const Grid2D& g = f.grid();
  const int n = g.n();
  std::vector<double> w(f.size());
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      const double x = axis == 1 ? g.coord(i1) : g.coord(i2);
      w[g.index(i1, i2)] = x * f(i1, i2);
    }
  return pairwise_sum(w) * g.dx() * g.dx();
}

}  // namespace

GaugeSolution solve_gauge_detailed(const FieldState& s, bool flat) {
  validate(s);
  const GridPtr& gp = s.grid_ptr();
  const Grid2D& g = *gp;
  const int n = g.n();
  const std::size_t N = g.size();

  GaugeSolution out;
  out.phi_hat = to_spectrum(s.phi);
  {
    ComplexField t1 = out.phi_hat, t2 = out.phi_hat;
    apply_derivative(t1, Axis::x1);
    apply_derivative(t2, Axis::x2);
    out.d1phi = from_spectrum_complex(std::move(t1));
    out.d2phi = from_spectrum_complex(std::move(t2));
  }

  out.J.j0 = RealField(gp);
  for (std::size_t k = 0; k < N; ++k) out.J.j0[k] = (s.phi[k] * std::conj(s.psi[k])).imag();

  if (flat) {
    out.A = zero_potential(gp);
    out.a0 = out.a1 = out.a2 = RealField(gp);
    out.J.j1 = RealField(gp);
    out.J.j2 = RealField(gp);
    for (std::size_t k = 0; k < N; ++k) {
      out.J.j1[k] = (s.phi[k] * std::conj(out.d1phi[k])).imag();
      out.J.j2[k] = (s.phi[k] * std::conj(out.d2phi[k])).imag();
    }
    return out;
  }

  GaugeBackground bg;
  const double L2 = g.L() * g.L();

  // (ii) F12 = -J0;  Laplacian A1 = -d2 F12 = d2 J0,  Laplacian A2 = d1 F12 = -d1 J0.
  // Both sources are packed into one complex spectrum.
  {
    const ComplexField j0hat = to_spectrum(out.J.j0);
    bg.j0_mean = j0hat(0, 0).real() / static_cast<double>(N);
    ComplexField src(gp);
    for (int m1 = 0; m1 < n; ++m1) {
      const double k1 = g.nyquist(m1) ? 0.0 : g.wavenumber(m1);
      for (int m2 = 0; m2 < n; ++m2) {
        const double k2 = g.nyquist(m2) ? 0.0 : g.wavenumber(m2);
        const cplx j = j0hat(m1, m2);
        const cplx s1 = cplx(0.0, k2) * j;   // d2 J0
        const cplx s2 = cplx(0.0, -k1) * j;  // -d1 J0
        src(m1, m2) = s1 + cplx(0.0, 1.0) * s2;
      }
    }
    apply_inverse_laplacian(src);
    const ComplexField a12 = from_spectrum_complex(std::move(src));
    out.A.a1 = RealField(gp);
    out.A.a2 = RealField(gp);
    for (std::size_t k = 0; k < N; ++k) {
      out.A.a1[k] = a12[k].real();
      out.A.a2[k] = a12[k].imag();
    }
  }
  bg.s1 = moment(out.J.j0, 1) / L2;
  bg.s2 = moment(out.J.j0, 2) / L2;

  // (iii) J1, J2 with the full spatial potential.
  out.a1 = RealField(gp);
  out.a2 = RealField(gp);
  out.J.j1 = RealField(gp);
  out.J.j2 = RealField(gp);
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = g.coord(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const double x2 = g.coord(i2);
      const std::size_t k = g.index(i1, i2);
      const double a1 = out.A.a1[k] + bg.a1(x1, x2);
      const double a2 = out.A.a2[k] + bg.a2(x1, x2);
      out.a1[k] = a1;
      out.a2[k] = a2;
      const cplx ph = s.phi[k];
      const double rho = std::norm(ph);
      out.J.j1[k] = (ph * std::conj(out.d1phi[k])).imag() - a1 * rho;
      out.J.j2[k] = (ph * std::conj(out.d2phi[k])).imag() - a2 * rho;
    }
  }

  // (iv) F01 = J2, F02 = -J1;  Laplacian A0 = -d1 F01 - d2 F02 = -d1 J2 + d2 J1.
  {
    ComplexField z(gp);
    for (std::size_t k = 0; k < N; ++k) z[k] = cplx(out.J.j1[k], out.J.j2[k]);
    g.forward(z.data());
    ComplexField j1hat(gp), j2hat(gp);
    unpack_real_pair(z, j1hat, j2hat);
    bg.m1 = j1hat(0, 0).real() / static_cast<double>(N);
    bg.m2 = j2hat(0, 0).real() / static_cast<double>(N);
    ComplexField src(gp);
    for (int m1 = 0; m1 < n; ++m1) {
      const double k1 = g.nyquist(m1) ? 0.0 : g.wavenumber(m1);
      for (int m2 = 0; m2 < n; ++m2) {
        const double k2 = g.nyquist(m2) ? 0.0 : g.wavenumber(m2);
        src(m1, m2) = cplx(0.0, -k1) * j2hat(m1, m2) + cplx(0.0, k2) * j1hat(m1, m2);
      }
    }
    apply_inverse_laplacian(src);
    out.A.a0 = from_spectrum_real(std::move(src));
  }
  out.A.bg = bg;

  out.a0 = RealField(gp);
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = g.coord(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const std::size_t k = g.index(i1, i2);
      out.a0[k] = out.A.a0[k] + bg.a0(x1, g.coord(i2));
    }
  }
  return out;
}

GaugePotential solve_gauge(const FieldState& s, bool flat) {
  return solve_gauge_detailed(s, flat).A;
}

ConstraintResiduals constraint_residuals(const FieldState& s, const GaugePotential& A,
                                         const TemporalNeighbors* temporal) {
  ConstraintResiduals r;
  const Current J = compute_current(s, A);
  const RealField d1a1 = A.derivative(1, Axis::x1);
  const RealField d2a2 = A.derivative(2, Axis::x2);
  const RealField d1a2 = A.derivative(2, Axis::x1);
  const RealField d2a1 = A.derivative(1, Axis::x2);
  for (std::size_t k = 0; k < J.j0.size(); ++k) {
    r.coulomb = std::max(r.coulomb, std::abs(d1a1[k] + d2a2[k]));
    r.spatial = std::max(r.spatial, std::abs(d1a2[k] - d2a1[k] + J.j0[k]));
  }
  r.field_scale = std::max({max_abs(J.j0), max_abs(J.j1), max_abs(J.j2)});
  const RealField a1 = A.full(1), a2 = A.full(2);
  r.potential_scale = std::max(max_abs(a1), max_abs(a2));

  if (temporal) {
    if (!temporal->prev) throw DomainError("constraint_residuals: temporal residuals need A_prev");
    if (!(temporal->dt > 0.0)) throw DomainError("constraint_residuals: dt must be positive");
    r.has_temporal = true;
    r.centered = temporal->next != nullptr;
    const RealField p1 = temporal->prev->full(1), p2 = temporal->prev->full(2);
    RealField q1 = a1, q2 = a2;
    double span = temporal->dt;
    if (temporal->next) {
      q1 = temporal->next->full(1);
      q2 = temporal->next->full(2);
      span = 2.0 * temporal->dt;
    }
    const RealField d1a0 = A.derivative(0, Axis::x1);
    const RealField d2a0 = A.derivative(0, Axis::x2);
    for (std::size_t k = 0; k < J.j0.size(); ++k) {
      const double dta1 = (q1[k] - p1[k]) / span;
      const double dta2 = (q2[k] - p2[k]) / span;
      r.temporal01 = std::max(r.temporal01, std::abs(dta1 - d1a0[k] - J.j2[k]));
      r.temporal02 = std::max(r.temporal02, std::abs(dta2 - d2a0[k] + J.j1[k]));
    }
  }
  return r;
}

}  // namespace csh
