#include "csh/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "csh/diagnostics.hpp"
#include "csh/io.hpp"

namespace csh {

namespace {

constexpr double kEta[3] = {-1.0, 1.0, 1.0};

Mat3 scaled_metric(double c) {
  Mat3 m{};
  for (int a = 0; a < 3; ++a) m[a][a] = c * kEta[a];
  return m;
}

bool in_region(Region r, double t, double x1) {
  switch (r) {
    case Region::slab: return true;
    case Region::interior_halfspace: return x1 <= t;
    case Region::exterior_halfspace: return x1 >= t;
  }
  return true;
}

MultiplierSpec time_spec() {
  MultiplierSpec s;
  s.name = "time";
  s.region = Region::slab;
  s.X = [](double, double, double) { return Vec3{1.0, 0.0, 0.0}; };
  s.chi = [](double, double, double) { return 0.0; };
  s.dchi = [](double, double, double) { return Vec3{}; };
  s.pi = [](double, double, double) { return Mat3{}; };
  s.box_chi = [](double, double, double) { return 0.0; };
  return s;
}

MultiplierSpec exterior_spec(double shift, const char* name) {
  MultiplierSpec s;
  s.name = name;
  s.region = Region::exterior_halfspace;
  s.X = [shift](double t, double x1, double x2) {
    const double u = t - x1;
    return Vec3{x2 * x2 + u * u + shift, x2 * x2 - u * u, 2.0 * u * x2};
  };
  s.chi = [](double t, double x1, double) { return t - x1; };
  s.dchi = [](double, double, double) { return Vec3{1.0, -1.0, 0.0}; };
  s.pi = [](double t, double x1, double) { return scaled_metric(2.0 * (t - x1)); };
  s.box_chi = [](double, double, double) { return 0.0; };
  return s;
}

MultiplierSpec interior_spec(double p) {
  const double q = 0.5 * (p - 1.0);
  MultiplierSpec s;
  s.name = "interior";
  s.region = Region::interior_halfspace;
  s.X = [q](double t, double x1, double x2) {
    const double u = t - x1 + 1.0;
    const double uq = std::pow(u, q), uq2 = std::pow(u, q - 2.0);
    return Vec3{uq + uq2 * x2 * x2, -uq + uq2 * x2 * x2, 2.0 * std::pow(u, q - 1.0) * x2};
  };
  s.chi = [q](double t, double x1, double) { return std::pow(t - x1 + 1.0, q - 1.0); };
  s.dchi = [q](double t, double x1, double) {
    const double d = (q - 1.0) * std::pow(t - x1 + 1.0, q - 2.0);
    return Vec3{d, -d, 0.0};
  };
  s.pi = [q](double t, double x1, double x2) {
    // Null-frame components (L = dt + d1, Lb = dt - d1) converted to
    // Cartesian ones with dt = (L + Lb)/2, d1 = (L - Lb)/2.
    const double u = t - x1 + 1.0;
    const double a = -2.0 * q * std::pow(u, q - 1.0);                 // pi(L, Lb)
    const double b = -4.0 * (q - 2.0) * std::pow(u, q - 3.0) * x2 * x2;  // pi(Lb, Lb)
    const double c = 2.0 * (q - 2.0) * std::pow(u, q - 2.0) * x2;       // pi(Lb, d2)
    const double d = 2.0 * std::pow(u, q - 1.0);                        // pi(d2, d2)
    Mat3 m{};
    m[0][0] = 0.25 * (2.0 * a + b);
    m[1][1] = 0.25 * (-2.0 * a + b);
    m[0][1] = m[1][0] = -0.25 * b;
    m[0][2] = m[2][0] = 0.5 * c;
    m[1][2] = m[2][1] = -0.5 * c;
    m[2][2] = d;
    return m;
  };
  s.box_chi = [](double, double, double) { return 0.0; };
  return s;
}

MultiplierSpec conformal_spec() {
  MultiplierSpec s;
  s.name = "conformal";
  s.region = Region::slab;
  s.X = [](double t, double x1, double x2) {
    return Vec3{t * t + x1 * x1 + x2 * x2, 2.0 * t * x1, 2.0 * t * x2};
  };
  s.chi = [](double t, double, double) { return t; };
  s.dchi = [](double, double, double) { return Vec3{1.0, 0.0, 0.0}; };
  s.pi = [](double t, double, double) { return scaled_metric(2.0 * t); };
  s.box_chi = [](double, double, double) { return 0.0; };
  return s;
}

double pot_density(const cplx& phi, double p) { return std::pow(std::abs(phi), p + 1.0); }

double p0_point(const MultiplierSpec& spec, double t, double x1, double x2, const cplx& phi, const cplx& psi,
                const cplx& d1, const cplx& d2, double p) {
  const Mat3 T = energy_momentum(phi, psi, d1, d2, p);
  const Vec3 X = spec.X(t, x1, x2);
  const Vec3 dc = spec.dchi(t, x1, x2);
  double v = T[0][0] * X[0] + T[0][1] * X[1] + T[0][2] * X[2];
  v += -0.5 * dc[0] * std::norm(phi) + spec.chi(t, x1, x2) * (std::conj(phi) * psi).real();
  return v;
}

double bulk_point(const MultiplierSpec& spec, double t, double x1, double x2, const cplx& phi, const cplx& psi,
                  const cplx& d1, const cplx& d2, double p) {
  const Mat3 T = energy_momentum(phi, psi, d1, d2, p);
  const Mat3 P = spec.pi(t, x1, x2);
  double v = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) v += kEta[a] * kEta[b] * T[a][b] * P[a][b];
  const double dd = -std::norm(psi) + std::norm(d1) + std::norm(d2);
  v += spec.chi(t, x1, x2) * (dd + pot_density(phi, p));
  v -= 0.5 * spec.box_chi(t, x1, x2) * std::norm(phi);
  return v;
}

template <class F>
RealField region_density(const FieldState& s, const GaugeSolution& G, const MultiplierSpec& spec, F&& point) {
  const Grid2D& g = s.grid();
  const int n = g.n();
  const CovariantFields c = covariant_fields(s, G);
  RealField out(s.grid_ptr());
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = g.coord(i1);
    if (!in_region(spec.region, s.t, x1)) continue;
    for (int i2 = 0; i2 < n; ++i2) {
      const std::size_t k = g.index(i1, i2);
      out[k] = point(spec, s.t, x1, g.coord(i2), s.phi[k], s.psi[k], c.d1[k], c.d2[k], s.p);
    }
  }
  return out;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i) acc += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
  return acc;
}

}  // namespace

std::string to_string(Region r) {
  switch (r) {
    case Region::slab: return "slab";
    case Region::exterior_halfspace: return "exterior_halfspace";
    case Region::interior_halfspace: return "interior_halfspace";
  }
  return "?";
}

std::vector<MultiplierSpec> catalog(double p) {
  return {time_spec(), exterior_spec(0.0, "exterior"), interior_spec(p), conformal_spec()};
}

std::vector<MultiplierSpec> extended_catalog(double p) {
  auto c = catalog(p);
  c.push_back(exterior_spec(1.0, "exterior_shifted"));
  return c;
}

MultiplierSpec find_spec(const std::string& name, double p) {
  for (auto& s : extended_catalog(p))
    if (s.name == name) return s;
  throw DomainError("unknown multiplier '" + name + "'");
}

double deformation_consistency(const MultiplierSpec& spec, unsigned seed, int points) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> T(0.0, 10.0), X(-10.0, 10.0), U(0.0, 10.0);
  const double h = 1e-4;
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    double y[3] = {T(rng), X(rng), X(rng)};
    if (spec.region == Region::interior_halfspace) y[1] = y[0] - U(rng);
    if (spec.region == Region::exterior_halfspace) y[1] = y[0] + U(rng);
    // d_mu X_nu by centered differences, X_nu = eta_nu X^nu.
    double dX[3][3];
    for (int mu = 0; mu < 3; ++mu) {
      double a[3] = {y[0], y[1], y[2]}, b[3] = {y[0], y[1], y[2]};
      a[mu] += h;
      b[mu] -= h;
      const Vec3 Xa = spec.X(a[0], a[1], a[2]), Xb = spec.X(b[0], b[1], b[2]);
      for (int nu = 0; nu < 3; ++nu) dX[mu][nu] = kEta[nu] * (Xa[nu] - Xb[nu]) / (2.0 * h);
    }
    const Mat3 P = spec.pi(y[0], y[1], y[2]);
    double pmax = 0.0, err = 0.0;
    for (int mu = 0; mu < 3; ++mu)
      for (int nu = 0; nu < 3; ++nu) {
        pmax = std::max(pmax, std::abs(P[mu][nu]));
        err = std::max(err, std::abs(P[mu][nu] - 0.5 * (dX[mu][nu] + dX[nu][mu])));
      }
    worst = std::max(worst, err / (1.0 + pmax));
  }
  return worst;
}

Mat3 energy_momentum(const cplx& phi, const cplx& psi, const cplx& d1, const cplx& d2, double p) {
  const cplx D[3] = {psi, d1, d2};
  const double lag = -std::norm(psi) + std::norm(d1) + std::norm(d2) + 2.0 / (p + 1.0) * pot_density(phi, p);
  Mat3 T{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) T[a][b] = (D[a] * std::conj(D[b])).real() - (a == b ? 0.5 * kEta[a] * lag : 0.0);
  return T;
}

RealField p0_density(const FieldState& s, const GaugeSolution& G, const MultiplierSpec& spec) {
  return region_density(s, G, spec, p0_point);
}

RealField bulk_density(const FieldState& s, const GaugeSolution& G, const MultiplierSpec& spec) {
  return region_density(s, G, spec, bulk_point);
}

double region_integral(const RealField& f, const MultiplierSpec& spec, double t) {
  switch (spec.region) {
    case Region::slab: return integrate(f);
    case Region::interior_halfspace: return halfplane_integrate(f, t, HalfPlane::below);
    case Region::exterior_halfspace: return halfplane_integrate(f, t, HalfPlane::above);
  }
  return 0.0;
}

NullPlaneTerms null_plane_terms(const FieldState& s, const GaugeSolution& G, const MultiplierSpec& spec) {
  NullPlaneTerms out;
  const Grid2D& g = s.grid();
  const double t = s.t;
  const CovariantFields c = covariant_fields(s, G);
  const auto phi = interpolate_column(s.phi, t);
  const auto psi = interpolate_column(s.psi, t);
  const auto d1 = interpolate_column(c.d1, t);
  const auto d2 = interpolate_column(c.d2, t);
  const int n = g.n();
  std::vector<double> tl(n), ch(n);
  for (int j = 0; j < n; ++j) {
    const double x2 = g.coord(j);
    const Mat3 T = energy_momentum(phi[j], psi[j], d1[j], d2[j], s.p);
    const Vec3 X = spec.X(t, t, x2);
    const Vec3 dc = spec.dchi(t, t, x2);
    double v = 0.0;
    for (int nu = 0; nu < 3; ++nu) v += (T[0][nu] + T[1][nu]) * X[nu];
    tl[j] = v - (dc[0] + dc[1]) * std::norm(phi[j]);
    ch[j] = spec.chi(t, t, x2) * std::norm(phi[j]);
  }
  out.tl = integrate_line(g, tl);
  out.chi = integrate_line(g, ch);
  return out;
}

double cs_force_relative(const Current& J, const MultiplierSpec& spec, double t) {
  const ForceResidual r = chern_simons_force(J, spec.X, t);
  return r.scale > 0.0 ? r.max_abs / r.scale : 0.0;
}

RealField interior_bulk_closed_form(const FieldState& s, const GaugeSolution& G, double p) {
  const double q = 0.5 * (p - 1.0);
  const Grid2D& g = s.grid();
  const int n = g.n();
  const CovariantFields c = covariant_fields(s, G);
  RealField out(s.grid_ptr());
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = g.coord(i1);
    if (x1 > s.t) continue;
    const double u = s.t - x1 + 1.0;
    for (int i2 = 0; i2 < n; ++i2) {
      const std::size_t k = g.index(i1, i2);
      const cplx v = g.coord(i2) * (s.psi[k] + c.d1[k]) + u * c.d2[k];
      out[k] = (2.0 - q) * std::pow(u, q - 3.0) * std::norm(v);
    }
  }
  return out;
}

namespace {

struct SampleSeries {
  std::vector<double> t, bulk;
  double pa = 0.0, pb = 0.0;
  double bulk_min = 0.0;
  double cs_force = 0.0;
};

SampleSeries sample_window(const RunArchive& run, const MultiplierSpec& spec, double t_a, double t_b) {
  const auto snaps = run.snapshots_in(t_a, t_b);
  if (snaps.size() < 2) throw DomainError("audit: need stored snapshots at both ends of the window");
  SampleSeries out;
  bool first = true;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    const FieldState s = run.load(snaps[i]);
    const GaugeSolution G = solve_gauge_detailed(s, run.evolution().flat);
    const RealField b = bulk_density(s, G, spec);
    out.t.push_back(s.t);
    out.bulk.push_back(region_integral(b, spec, s.t));
    for (double v : b.values()) {
      out.bulk_min = first ? v : std::min(out.bulk_min, v);
      first = false;
    }
    out.cs_force = std::max(out.cs_force, cs_force_relative(G.J, spec, s.t));
    if (i == 0 || i + 1 == snaps.size()) {
      const double P = region_integral(p0_density(s, G, spec), spec, s.t);
      (i == 0 ? out.pa : out.pb) = P;
    }
  }
  return out;
}

}  // namespace

AuditReport audit_slab(const RunArchive& run, const MultiplierSpec& spec, double t_a, double t_b) {
  if (spec.region != Region::slab) throw DomainError("audit_slab: spec region is not a slab");
  const SampleSeries S = sample_window(run, spec, t_a, t_b);
  AuditReport r;
  r.spec = spec.name;
  r.region = spec.region;
  r.t_a = S.t.front();
  r.t_b = S.t.back();
  r.samples = static_cast<int>(S.t.size());
  r.boundary_a = S.pa;
  r.boundary_b = S.pb;
  r.bulk = trapezoid(S.t, S.bulk);
  r.bulk_min = S.bulk_min;
  r.cs_force = S.cs_force;
  // Stokes on [t_a, t_b] x R^2:  bulk = -(P(t_b) - P(t_a)).
  r.residual = (r.boundary_b - r.boundary_a) + r.bulk;
  r.scale = std::max({std::abs(r.boundary_a), std::abs(r.boundary_b), std::abs(r.bulk)});
  r.relative = r.scale > 0.0 ? std::abs(r.residual) / r.scale : 0.0;
  return r;
}

AuditReport audit_halfspace(const RunArchive& run, const MultiplierSpec& spec, double t_a, double t_b) {
  if (spec.region == Region::slab) throw DomainError("audit_halfspace: spec region is a slab");
  if (!run.has_null_series())
    throw DomainError("audit_halfspace: run has no null-plane series; enable toggles.null_flux");
  const CsvTable& ns = run.null_series();
  const std::string tl_col = "tl_" + spec.name, chi_col = "chi_" + spec.name;
  if (!ns.has(tl_col) || !ns.has(chi_col))
    throw DomainError("audit_halfspace: null-plane series lacks columns for '" + spec.name + "'");

  const SampleSeries S = sample_window(run, spec, t_a, t_b);
  AuditReport r;
  r.spec = spec.name;
  r.region = spec.region;
  r.t_a = S.t.front();
  r.t_b = S.t.back();
  r.samples = static_cast<int>(S.t.size());
  r.boundary_a = S.pa;
  r.boundary_b = S.pb;
  r.bulk = trapezoid(S.t, S.bulk);
  r.bulk_min = S.bulk_min;
  r.cs_force = S.cs_force;

  const auto& tc = ns.column("t");
  const auto& tl = ns.column(tl_col);
  const auto& ch = ns.column(chi_col);
  const double tol = 1e-9 * std::max(1.0, r.t_b);
  std::vector<double> tt, yy;
  bool have_a = false, have_b = false;
  for (std::size_t i = 0; i < tc.size(); ++i) {
    if (tc[i] < r.t_a - tol || tc[i] > r.t_b + tol) continue;
    tt.push_back(tc[i]);
    yy.push_back(tl[i]);
    if (std::abs(tc[i] - r.t_a) <= tol) {
      r.null_chi_a = ch[i];
      have_a = true;
    }
    if (std::abs(tc[i] - r.t_b) <= tol) {
      r.null_chi_b = ch[i];
      have_b = true;
    }
  }
  if (!have_a || !have_b) throw DomainError("audit_halfspace: null-plane series does not cover the window");
  r.null_tl = trapezoid(tt, yy);
  r.null_total = r.null_tl + 0.5 * (r.null_chi_b - r.null_chi_a);
  // Leibniz on the moving region: bulk = P(t_a) - P(t_b) + sigma * null_total,
  // sigma = +1 on {x1 <= t} and -1 on {x1 >= t}.
  const double sigma = spec.region == Region::interior_halfspace ? 1.0 : -1.0;
  r.residual = r.bulk - (r.boundary_a - r.boundary_b) - sigma * r.null_total;
  r.scale = std::max({std::abs(r.boundary_a), std::abs(r.boundary_b), std::abs(r.bulk), std::abs(r.null_total)});
  r.relative = r.scale > 0.0 ? std::abs(r.residual) / r.scale : 0.0;
  return r;
}

AuditReport audit(const RunArchive& run, const MultiplierSpec& spec, double t_a, double t_b) {
  return spec.region == Region::slab ? audit_slab(run, spec, t_a, t_b) : audit_halfspace(run, spec, t_a, t_b);
}

}  // namespace csh
