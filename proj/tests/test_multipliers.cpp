#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <map>

#include "csh/diagnostics.hpp"
#include "csh/io.hpp"
#include "csh/multipliers.hpp"
#include "support.hpp"

using namespace csh;
namespace fs = std::filesystem;

namespace {

const double kEta[3] = {-1.0, 1.0, 1.0};

// Runs shared between test cases, created on first use.
const RunArchive& shared_run(const std::string& key) {
  static std::map<std::string, std::unique_ptr<RunArchive>> cache;
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  RunConfig c;
  c.n = 128;
  c.L = 40.0;
  c.data.velocity = Velocity::i_phi;
  if (key == "window") {
    c.t_final = 5.0;
    c.snapshot_every = 2;
  } else if (key == "window_fine") {
    c.t_final = 5.0;
    c.snapshot_every = 1;
  } else if (key == "long") {
    c.t_final = 8.0;
    c.snapshot_every = 2;
  } else if (key == "zero") {
    c.t_final = 1.0;
    c.snapshot_every = 2;
    c.data.amplitude = 0.0;
  } else if (key == "no_null") {
    c.t_final = 1.0;
    c.snapshot_every = 2;
    c.toggles.null_flux = false;
  }
  const fs::path dir = fs::temp_directory_path() / ("csh_test_multipliers_" + key);
  fs::remove_all(dir);
  const RunResult r = run(c, dir);
  REQUIRE(r.status == "completed");
  return *(cache[key] = std::make_unique<RunArchive>(dir));
}

double contract(const Mat3& m, const Vec3& a, const Vec3& b) {
  double v = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v += m[i][j] * a[i] * b[j];
  return v;
}

FieldState random_state(unsigned seed, double t) {
  auto g = make_grid(64, 20.0);
  FieldState s = make_state(g, 3.0, t);
  s.phi = csh::testing::random_smooth_complex(g, seed, 3);
  s.psi = csh::testing::random_smooth_complex(g, seed + 50, 3);
  return s;
}

}  // namespace

TEST_CASE("catalog contents") {
  const auto c = catalog(3.0);
  REQUIRE(c.size() == 4);
  CHECK(c[0].name == "time");
  CHECK(c[1].name == "exterior");
  CHECK(c[2].name == "interior");
  CHECK(c[3].name == "conformal");
  CHECK(c[0].region == Region::slab);
  CHECK(c[1].region == Region::exterior_halfspace);
  CHECK(c[2].region == Region::interior_halfspace);
  CHECK(c[3].region == Region::slab);
  const auto e = extended_catalog(3.0);
  REQUIRE(e.size() == 5);
  CHECK(e[4].name == "exterior_shifted");
  CHECK(find_spec("interior", 4.0).name == "interior");
  CHECK_THROWS_AS(find_spec("nope", 3.0), DomainError);
}

TEST_CASE("property: analytic deformation tensors match finite differences") {
  for (double p : {2.0, 3.0, 4.0, 4.5, 5.0})
    for (const auto& spec : extended_catalog(p)) {
      CAPTURE(spec.name);
      CAPTURE(p);
      CHECK(deformation_consistency(spec, 7, 200) <= 1e-6);
    }
}

TEST_CASE("deformation tensors of the individual multipliers") {
  const auto c = catalog(3.0);
  const Mat3 zero = c[0].pi(1.0, 2.0, 3.0);
  for (const auto& row : zero)
    for (double v : row) CHECK(v == 0.0);

  // Exterior: 2 (t - x1) m.
  const Mat3 ext = c[1].pi(2.0, 3.5, -1.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(ext[a][b] == doctest::Approx(a == b ? 2.0 * (2.0 - 3.5) * kEta[a] : 0.0));

  // Interior, in the null frame L = dt + d1, Lb = dt - d1.
  for (double p : {3.0, 4.0, 5.0}) {
    const double q = 0.5 * (p - 1.0);
    const MultiplierSpec in = find_spec("interior", p);
    const double t = 3.0, x1 = 1.2, x2 = -0.7, u = t - x1 + 1.0;
    const Mat3 P = in.pi(t, x1, x2);
    const Vec3 L{1, 1, 0}, Lb{1, -1, 0}, e2{0, 0, 1};
    CHECK(contract(P, L, Lb) == doctest::Approx(-2 * q * std::pow(u, q - 1)));
    CHECK(contract(P, Lb, Lb) == doctest::Approx(-4 * (q - 2) * std::pow(u, q - 3) * x2 * x2));
    CHECK(contract(P, Lb, e2) == doctest::Approx(2 * (q - 2) * std::pow(u, q - 2) * x2));
    CHECK(contract(P, e2, e2) == doctest::Approx(2 * std::pow(u, q - 1)));
    CHECK(std::abs(contract(P, L, L)) <= 1e-12);
    CHECK(std::abs(contract(P, L, e2)) <= 1e-12);
  }
}

TEST_CASE("time multiplier densities") {
  const FieldState s = random_state(3, 0.0);
  const GaugeSolution G = solve_gauge_detailed(s);
  const MultiplierSpec t = find_spec("time", 3.0);
  CHECK(max_abs(bulk_density(s, G, t)) == 0.0);
  // T_00 is half the energy density.
  CHECK(region_integral(p0_density(s, G, t), t, 0.0) ==
        doctest::Approx(0.5 * standard_energy(s, G)).epsilon(1e-13));
}

TEST_CASE("energy-momentum tensor is symmetric with the expected trace") {
  const cplx phi(0.3, -0.2), psi(0.1, 0.5), d1(-0.4, 0.2), d2(0.25, 0.05);
  const double p = 3.0;
  const Mat3 T = energy_momentum(phi, psi, d1, d2, p);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) CHECK(T[a][b] == doctest::Approx(T[b][a]));
  // In 2+1 dimensions eta^{ab} T_ab = -(1/2) lag - 2/(p+1) |phi|^{p+1}.
  const double pot = std::pow(std::abs(phi), p + 1);
  const double lag = -std::norm(psi) + std::norm(d1) + std::norm(d2) + 2.0 / (p + 1) * pot;
  const double trace = -T[0][0] + T[1][1] + T[2][2];
  CHECK(trace == doctest::Approx(-0.5 * lag - 2.0 / (p + 1) * pot));
  CHECK(T[0][0] == doctest::Approx(0.5 * (std::norm(psi) + std::norm(d1) + std::norm(d2) + 2.0 / (p + 1) * pot)));
}

TEST_CASE("interior bulk density equals its closed form") {
  for (double p : {3.0, 5.0}) {
    FieldState s = random_state(5, 2.0);
    s.p = p;
    const GaugeSolution G = solve_gauge_detailed(s);
    const RealField general = bulk_density(s, G, find_spec("interior", p));
    const RealField closed = interior_bulk_closed_form(s, G, p);
    CAPTURE(p);
    CHECK(csh::testing::max_diff(general, closed) <= 1e-10 * (1.0 + max_abs(closed)));
  }
}

TEST_CASE("dropped Chern-Simons term vanishes on evolved states") {
  const RunArchive& r = shared_run("window");
  for (const auto& snap : r.snapshots()) {
    const FieldState s = r.load(snap);
    const GaugeSolution G = solve_gauge_detailed(s);
    for (const auto& spec : extended_catalog(3.0)) CHECK(cs_force_relative(G.J, spec, s.t) <= 1e-12);
  }
}

TEST_CASE("time slab audit reproduces the energy drift") {
  const RunArchive& r = shared_run("window");
  const AuditReport a = audit(r, find_spec("time", 3.0), 1.25, 3.75);
  CHECK(a.bulk == 0.0);
  const auto t = r.diagnostics().column("t"), e = r.diagnostics().column("energy");
  double ea = 0.0, eb = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (std::abs(t[k] - 1.25) < 1e-9) ea = e[k];
    if (std::abs(t[k] - 3.75) < 1e-9) eb = e[k];
  }
  REQUIRE(ea > 0.0);
  CHECK(std::abs(a.residual) == doctest::Approx(0.5 * std::abs(eb - ea)).epsilon(1e-6));
  CHECK(a.relative <= 1e-4);
  CHECK(a.cs_force <= 1e-12);
}

TEST_CASE("conformal slab audit converges with the snapshot cadence") {
  const AuditReport coarse = audit(shared_run("window"), find_spec("conformal", 3.0), 1.25, 3.75);
  const AuditReport fine = audit(shared_run("window_fine"), find_spec("conformal", 3.0), 1.25, 3.75);
  MESSAGE("conformal slab residual " << coarse.relative << " -> " << fine.relative);
  CHECK(coarse.relative <= 1e-3);
  CHECK(fine.relative <= 0.5 * coarse.relative);
  CHECK(fine.samples == 2 * coarse.samples - 1);
}

TEST_CASE("interior half-space audit over [0, 8]") {
  const AuditReport a = audit(shared_run("long"), find_spec("interior", 3.0), 0.0, 8.0);
  MESSAGE("interior residual " << a.relative << ", bulk_min " << a.bulk_min);
  CHECK(a.region == Region::interior_halfspace);
  CHECK(a.relative <= 2e-2);
  CHECK(a.bulk_min >= -1e-12 * a.scale);
  CHECK(a.null_tl != 0.0);
}

TEST_CASE("exterior half-space audits") {
  for (const char* name : {"exterior", "exterior_shifted"}) {
    const AuditReport a = audit(shared_run("window"), find_spec(name, 3.0), 1.25, 3.75);
    CAPTURE(name);
    MESSAGE(std::string(name) << " residual " << a.relative);
    CHECK(a.region == Region::exterior_halfspace);
    CHECK(a.relative <= 1e-2);
    CHECK(a.null_chi_a == 0.0);
  }
}

TEST_CASE("zero solution audits to zero") {
  const RunArchive& r = shared_run("zero");
  for (const auto& spec : catalog(3.0)) {
    const AuditReport a = audit(r, spec, 0.0, 1.0);
    CAPTURE(spec.name);
    CHECK(a.boundary_a == 0.0);
    CHECK(a.boundary_b == 0.0);
    CHECK(a.bulk == 0.0);
    CHECK(a.null_total == 0.0);
    CHECK(a.residual == 0.0);
    CHECK(a.relative == 0.0);
  }
}

TEST_CASE("audit errors") {
  const RunArchive& r = shared_run("window");
  CHECK_THROWS_AS(audit(r, find_spec("time", 3.0), 1.3, 3.75), DomainError);
  CHECK_THROWS_AS(audit_slab(r, find_spec("interior", 3.0), 1.25, 3.75), DomainError);
  CHECK_THROWS_AS(audit_halfspace(r, find_spec("time", 3.0), 1.25, 3.75), DomainError);
  try {
    audit(shared_run("no_null"), find_spec("interior", 3.0), 0.0, 1.0);
    FAIL("expected an error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("null_flux") != std::string::npos);
  }
}
