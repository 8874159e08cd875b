#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "csh/gauge.hpp"
#include "csh/state.hpp"
#include "support.hpp"

using namespace csh;
using csh::testing::max_diff;
using std::numbers::pi;

namespace {

int levi_civita(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0;
  // Parity of the permutation (a, b, c) of (0, 1, 2).
  int inv = (a > b) + (a > c) + (b > c);
  return inv % 2 == 0 ? 1 : -1;
}

FieldState gaussian_state(int n, double L, bool charged) {
  auto g = make_grid(n, L);
  FieldState s = make_state(g, 3.0);
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      const double x1 = g->coord(i1), x2 = g->coord(i2);
      const double v = std::exp(-(x1 * x1 + x2 * x2));
      s.phi(i1, i2) = v;
      s.psi(i1, i2) = charged ? cplx(0.0, v) : cplx(0.0);
    }
  return s;
}

}  // namespace

TEST_CASE("curvature signs agree with a brute-force epsilon contraction") {
  const double eta[3] = {-1.0, 1.0, 1.0};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  auto g = make_grid(32, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double Jlow[3] = {U(rng), U(rng), U(rng)};
    double F[3][3] = {};
    for (int mu = 0; mu < 3; ++mu)
      for (int nu = 0; nu < 3; ++nu)
        for (int gam = 0; gam < 3; ++gam) F[mu][nu] += levi_civita(mu, nu, gam) * eta[gam] * Jlow[gam];
    Current J{RealField(g, Jlow[0]), RealField(g, Jlow[1]), RealField(g, Jlow[2])};
    const Curvature C = build_curvature_from_current(J);
    CHECK(C.f01[0] == doctest::Approx(F[0][1]).epsilon(1e-15));
    CHECK(C.f02[0] == doctest::Approx(F[0][2]).epsilon(1e-15));
    CHECK(C.f12[0] == doctest::Approx(F[1][2]).epsilon(1e-15));
  }
}

TEST_CASE("curvature of a pure charge density") {
  auto g = make_grid(32, 1.0);
  Current J{RealField(g, 1.0), RealField(g), RealField(g)};
  const Curvature F = build_curvature_from_current(J);
  CHECK(F.f12[5] == -1.0);
  CHECK(F.f01[5] == 0.0);
  CHECK(F.f02[5] == 0.0);
  Current Z{RealField(g), RealField(g), RealField(g)};
  const Curvature F0 = build_curvature_from_current(Z);
  CHECK(max_abs(F0.f01) + max_abs(F0.f02) + max_abs(F0.f12) == 0.0);
}

TEST_CASE("skew symmetry kills the Chern-Simons force") {
  auto g = make_grid(32, 6.0);
  Current J{csh::testing::random_smooth(g, 1), csh::testing::random_smooth(g, 2),
            csh::testing::random_smooth(g, 3)};
  VectorFieldFn dt = [](double, double, double) { return std::array<double, 3>{1.0, 0.0, 0.0}; };
  VectorFieldFn conf = [](double t, double x1, double x2) {
    return std::array<double, 3>{t * t + x1 * x1 + x2 * x2, 2 * t * x1, 2 * t * x2};
  };
  for (const auto& X : {dt, conf}) {
    const auto r = chern_simons_force(J, X, 1.3);
    CHECK(r.scale > 0.0);
    CHECK(r.max_abs <= 1e-12 * r.scale);
  }
}

TEST_CASE("covariant derivative") {
  auto g = make_grid(64, 10.0);
  const double k = 2 * pi / g->L();
  FieldState s = make_state(g, 3.0);
  for (int i1 = 0; i1 < 64; ++i1)
    for (int i2 = 0; i2 < 64; ++i2) s.phi(i1, i2) = std::sin(k * g->coord(i1));
  GaugePotential A = zero_potential(g);
  auto d1 = covariant_derivative(s, A, 1);
  double err = 0.0;
  for (int i1 = 0; i1 < 64; ++i1)
    for (int i2 = 0; i2 < 64; ++i2) err = std::max(err, std::abs(d1(i1, i2) - k * std::cos(k * g->coord(i1))));
  CHECK(err <= 1e-12);
  CHECK(max_diff(covariant_derivative(s, A, 0), s.psi) == 0.0);

  // Constant field: D1 phi = i a1.
  FieldState c = make_state(g, 3.0);
  for (auto& v : c.phi.values()) v = 1.0;
  A.a1 = csh::testing::random_smooth(g, 4);
  auto dc = covariant_derivative(c, A, 1);
  for (std::size_t q = 0; q < dc.size(); ++q) CHECK(std::abs(dc[q] - cplx(0.0, A.a1[q])) <= 1e-12);

  CHECK_THROWS_AS(covariant_derivative(c, zero_potential(make_grid(32, 10.0)), 1), DomainError);
}

TEST_CASE("current of a real field and of a charged Gaussian") {
  FieldState real = gaussian_state(64, 20.0, false);
  auto A = zero_potential(real.grid_ptr());
  const Current J = compute_current(real, A);
  CHECK(max_abs(J.j0) + max_abs(J.j1) + max_abs(J.j2) == 0.0);

  FieldState ch = gaussian_state(64, 20.0, true);
  const Current Jc = compute_current(ch, A);
  CHECK(std::abs(integrate(Jc.j0) + pi / 2) <= 1e-10);
  double err = 0.0;
  for (std::size_t k = 0; k < ch.phi.size(); ++k) err = std::max(err, std::abs(Jc.j0[k] + std::norm(ch.phi[k])));
  CHECK(err <= 1e-15);
}

TEST_CASE("spatial current is Im(phi conj(D_j phi)) with the covariant derivative") {
  auto g = make_grid(64, 20.0);
  FieldState s = make_state(g, 3.0);
  s.phi = csh::testing::random_smooth_complex(g, 3, 3);
  s.psi = csh::testing::random_smooth_complex(g, 4, 3);
  GaugePotential A = zero_potential(g);
  A.a1 = csh::testing::random_smooth(g, 5, 3);
  A.a2 = csh::testing::random_smooth(g, 6, 3);
  const Current J = compute_current(s, A);
  for (int mu = 1; mu <= 2; ++mu) {
    const ComplexField D = covariant_derivative(s, A, mu);
    const RealField& j = mu == 1 ? J.j1 : J.j2;
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < D.size(); ++k) {
      const double ref = (s.phi[k] * std::conj(D[k])).imag();
      err = std::max(err, std::abs(j[k] - ref));
      scale = std::max(scale, std::abs(ref));
    }
    CHECK(err <= 1e-12 * scale);
  }
  // The gauge solver's own current matches the same expression.
  const GaugeSolution G = solve_gauge_detailed(s);
  const Current Jg = compute_current(s, G.A);
  CHECK(max_diff(Jg.j1, G.J.j1) <= 1e-12 * (1.0 + max_abs(G.J.j1)));
  CHECK(max_diff(Jg.j2, G.J.j2) <= 1e-12 * (1.0 + max_abs(G.J.j2)));
}

TEST_CASE("property: constant phase leaves currents and curvature unchanged") {
  auto g = make_grid(64, 12.0);
  FieldState s = make_state(g, 3.0);
  s.phi = csh::testing::random_smooth_complex(g, 7);
  s.psi = csh::testing::random_smooth_complex(g, 8);
  const GaugePotential A = solve_gauge(s);
  FieldState r = s;
  const cplx rot = std::polar(1.0, 0.731);
  for (auto& v : r.phi.values()) v *= rot;
  for (auto& v : r.psi.values()) v *= rot;
  const Current J1 = compute_current(s, A), J2 = compute_current(r, A);
  const double sc = max_abs(J1.j0) + max_abs(J1.j1) + max_abs(J1.j2);
  CHECK(max_diff(J1.j0, J2.j0) <= 1e-13 * sc);
  CHECK(max_diff(J1.j1, J2.j1) <= 1e-13 * sc);
  CHECK(max_diff(J1.j2, J2.j2) <= 1e-13 * sc);
  const Curvature F1 = build_curvature_from_current(J1), F2 = build_curvature_from_current(J2);
  CHECK(max_diff(F1.f12, F2.f12) <= 1e-13 * sc);
}

TEST_CASE("Chern-Simons force vanishes on the current of a solved gauge") {
  FieldState s = gaussian_state(64, 20.0, true);
  const GaugeSolution G = solve_gauge_detailed(s);
  VectorFieldFn conf = [](double t, double x1, double x2) {
    return std::array<double, 3>{t * t + x1 * x1 + x2 * x2, 2 * t * x1, 2 * t * x2};
  };
  const auto r = chern_simons_force(G.J, conf, 1.0);
  CHECK(r.max_abs <= 1e-12 * r.scale);
}

TEST_CASE("state validation") {
  auto g = make_grid(32, 1.0);
  FieldState s = make_state(g, 1.0);
  CHECK_THROWS_AS(validate(s), DomainError);
  s.p = 3.0;
  validate(s);
  s.psi(1, 1) = cplx(std::numeric_limits<double>::infinity(), 0.0);
  CHECK_THROWS_AS(validate(s), NonFiniteError);
}
