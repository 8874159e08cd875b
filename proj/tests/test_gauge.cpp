#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "csh/gauge.hpp"
#include "support.hpp"

using namespace csh;
using csh::testing::max_diff;
using std::numbers::pi;

namespace {

FieldState charged_gaussian(int n, double L, double x0 = 0.0) {
  auto g = make_grid(n, L);
  FieldState s = make_state(g, 3.0);
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      const double x1 = g->coord(i1) - x0, x2 = g->coord(i2);
      const double v = std::exp(-(x1 * x1 + x2 * x2));
      s.phi(i1, i2) = v;
      s.psi(i1, i2) = cplx(0.0, v);
    }
  return s;
}

// Naive 2D DFT, independent of the FFT path.
std::vector<cplx> naive_dft(const RealField& f, int sign) {
  const Grid2D& g = f.grid();
  const int n = g.n();
  std::vector<cplx> tmp(g.size()), out(g.size());
  for (int i1 = 0; i1 < n; ++i1)
    for (int m2 = 0; m2 < n; ++m2) {
      cplx acc = 0.0;
      for (int i2 = 0; i2 < n; ++i2) acc += f(i1, i2) * std::polar(1.0, sign * 2 * pi * m2 * i2 / n);
      tmp[g.index(i1, m2)] = acc;
    }
  for (int m1 = 0; m1 < n; ++m1)
    for (int m2 = 0; m2 < n; ++m2) {
      cplx acc = 0.0;
      for (int i1 = 0; i1 < n; ++i1) acc += tmp[g.index(i1, m2)] * std::polar(1.0, sign * 2 * pi * m1 * i1 / n);
      out[g.index(m1, m2)] = acc;
    }
  return out;
}

}  // namespace

TEST_CASE("zero field has zero potential and residuals") {
  auto g = make_grid(32, 10.0);
  FieldState s = make_state(g, 3.0);
  const auto A = solve_gauge(s);
  CHECK(max_abs(A.a0) + max_abs(A.a1) + max_abs(A.a2) == 0.0);
  const TemporalNeighbors tn{&A, &A, 0.1};
  const auto r = constraint_residuals(s, A, &tn);
  CHECK(r.coulomb + r.spatial + r.temporal01 + r.temporal02 == 0.0);
}

TEST_CASE("temporal residuals demand a previous potential") {
  auto g = make_grid(32, 10.0);
  FieldState s = make_state(g, 3.0);
  const auto A = solve_gauge(s);
  const TemporalNeighbors tn{nullptr, nullptr, 0.1};
  CHECK_THROWS_AS(constraint_residuals(s, A, &tn), DomainError);
}

TEST_CASE("charged Gaussian: periodic potential matches a direct Fourier solve") {
  const int n = 64;
  FieldState s = charged_gaussian(n, 20.0);
  const auto A = solve_gauge(s);
  const Grid2D& g = s.grid();
  RealField j0(s.grid_ptr());
  for (std::size_t k = 0; k < j0.size(); ++k) j0[k] = -std::norm(s.phi[k]);

  // Laplacian A1 = d2 J0:  A1hat = i k2 J0hat / (-|k|^2).
  const auto jh = naive_dft(j0, -1);
  RealField ref1(s.grid_ptr()), ref2(s.grid_ptr());
  {
    std::vector<cplx> a1h(g.size()), a2h(g.size());
    for (int m1 = 0; m1 < n; ++m1)
      for (int m2 = 0; m2 < n; ++m2) {
        const double k1 = m1 == n / 2 ? 0.0 : g.wavenumber(m1);
        const double k2 = m2 == n / 2 ? 0.0 : g.wavenumber(m2);
        const double kk = g.wavenumber(m1) * g.wavenumber(m1) + g.wavenumber(m2) * g.wavenumber(m2);
        const std::size_t q = g.index(m1, m2);
        if (kk == 0.0) continue;
        a1h[q] = cplx(0.0, k2) * jh[q] / -kk;
        a2h[q] = cplx(0.0, -k1) * jh[q] / -kk;
      }
    RealField re(s.grid_ptr()), im(s.grid_ptr());
    for (std::size_t q = 0; q < g.size(); ++q) {
      re[q] = a1h[q].real();
      im[q] = a1h[q].imag();
    }
    auto back_re = naive_dft(re, 1), back_im = naive_dft(im, 1);
    for (std::size_t q = 0; q < g.size(); ++q) ref1[q] = (back_re[q] + cplx(0, 1) * back_im[q]).real() / g.size();
    for (std::size_t q = 0; q < g.size(); ++q) {
      re[q] = a2h[q].real();
      im[q] = a2h[q].imag();
    }
    back_re = naive_dft(re, 1);
    back_im = naive_dft(im, 1);
    for (std::size_t q = 0; q < g.size(); ++q) ref2[q] = (back_re[q] + cplx(0, 1) * back_im[q]).real() / g.size();
  }
  CHECK(max_diff(A.a1, ref1) <= 1e-12);
  CHECK(max_diff(A.a2, ref2) <= 1e-12);
  CHECK(A.bg.j0_mean == doctest::Approx(-pi / 2 / 400.0).epsilon(1e-10));
}

TEST_CASE("charged Gaussian: full potential approaches the planar vortex profile as L grows") {
  // On the plane, F12 = -J0 = exp(-2r^2) with an azimuthal Coulomb potential
  // A_theta = (1 - exp(-2 r^2)) / (4 r).
  double prev = 1e300;
  for (double L : {10.0, 20.0, 40.0}) {
    const int n = static_cast<int>(L * 6.4);
    int np2 = 32;
    while (np2 < n) np2 *= 2;
    FieldState s = charged_gaussian(np2, L);
    const auto A = solve_gauge(s);
    const auto a1 = A.full(1), a2 = A.full(2);
    const Grid2D& g = s.grid();
    double err = 0.0;
    for (int i1 = 0; i1 < g.n(); ++i1)
      for (int i2 = 0; i2 < g.n(); ++i2) {
        const double x1 = g.coord(i1), x2 = g.coord(i2);
        const double r = std::hypot(x1, x2);
        if (r > 3.0 || r == 0.0) continue;
        const double at = (1.0 - std::exp(-2 * r * r)) / (4 * r);
        const std::size_t q = g.index(i1, i2);
        err = std::max(err, std::hypot(a1[q] + at * x2 / r, a2[q] - at * x1 / r));
      }
    MESSAGE("L=" << L << " max deviation from planar profile " << err);
    CHECK(err < 0.6 * prev);
    prev = err;
  }
  CHECK(prev <= 1e-3);
}

TEST_CASE("manufactured single-mode charge density") {
  // phi = 1, psi = -i sin(k x2) gives J0 = sin(k x2), so
  // Laplacian A1 = k cos(k x2)  =>  A1 = -cos(k x2)/k, and A2 = 0.
  const int n = 64;
  const double L = 9.0, k = 2 * pi / L;
  auto g = make_grid(n, L);
  FieldState s = make_state(g, 3.0);
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      s.phi(i1, i2) = 1.0;
      s.psi(i1, i2) = cplx(0.0, -std::sin(k * g->coord(i2)));
    }
  const auto A = solve_gauge(s);
  double e1 = 0.0;
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) e1 = std::max(e1, std::abs(A.a1(i1, i2) + std::cos(k * g->coord(i2)) / k));
  CHECK(e1 <= 1e-13);
  CHECK(max_abs(A.a2) <= 1e-13);
}

TEST_CASE("property: solve is idempotent and phase blind") {
  auto g = make_grid(64, 12.0);
  FieldState s = make_state(g, 3.0);
  s.phi = csh::testing::random_smooth_complex(g, 31);
  s.psi = csh::testing::random_smooth_complex(g, 32);
  // Localize so the background terms see a compact charge.
  for (int i1 = 0; i1 < 64; ++i1)
    for (int i2 = 0; i2 < 64; ++i2) {
      const double w = std::exp(-0.3 * (g->coord(i1) * g->coord(i1) + g->coord(i2) * g->coord(i2)));
      s.phi(i1, i2) *= w;
      s.psi(i1, i2) *= w;
    }
  const auto A = solve_gauge(s), B = solve_gauge(s);
  CHECK(max_diff(A.a0, B.a0) == 0.0);
  CHECK(max_diff(A.a1, B.a1) == 0.0);
  CHECK(max_diff(A.a2, B.a2) == 0.0);

  FieldState r = s;
  const cplx rot = std::polar(1.0, -2.1);
  for (auto& v : r.phi.values()) v *= rot;
  for (auto& v : r.psi.values()) v *= rot;
  const auto C = solve_gauge(r);
  const double sc = 1 + max_abs(A.a0) + max_abs(A.a1) + max_abs(A.a2);
  CHECK(max_diff(A.a0, C.a0) <= 1e-13 * sc);
  CHECK(max_diff(A.a1, C.a1) <= 1e-13 * sc);
  CHECK(max_diff(A.a2, C.a2) <= 1e-13 * sc);

  CHECK(std::abs(mean(A.a0)) <= 1e-15 * sc);
  CHECK(std::abs(mean(A.a1)) <= 1e-15 * sc);
  CHECK(std::abs(mean(A.a2)) <= 1e-15 * sc);

  const auto res = constraint_residuals(s, A);
  CHECK(res.coulomb <= 1e-10 * (1 + res.potential_scale));
  CHECK(res.spatial <= 1e-10 * res.field_scale);
}

TEST_CASE("off-centre charge: background follows the centre of charge") {
  FieldState s = charged_gaussian(128, 30.0, 2.0);
  const auto A = solve_gauge(s);
  // s1 = (integral x1 J0)/L^2 = 2 * Q / L^2.
  CHECK(A.bg.s1 == doctest::Approx(2.0 * A.bg.j0_mean).epsilon(1e-9));
  CHECK(std::abs(A.bg.s2) <= 1e-14);
  const auto res = constraint_residuals(s, A);
  CHECK(res.spatial <= 1e-10 * res.field_scale);
}
