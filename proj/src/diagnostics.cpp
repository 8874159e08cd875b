#include "csh/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace csh {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class F>
double integrate_pointwise(const FieldState& s, F&& f) {
  const Grid2D& g = s.grid();
  const int n = g.n();
  RealField w(s.grid_ptr());
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = g.coord(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const std::size_t k = g.index(i1, i2);
      w[k] = f(k, x1, g.coord(i2));
    }
  }
  return integrate(w);
}

double pot_density(const cplx& phi, double p) { return std::pow(std::abs(phi), p + 1.0); }

}  // namespace

const std::vector<std::pair<std::string, std::string>>& diagnostics_columns() {
  static const std::vector<std::pair<std::string, std::string>> cols = {
      {"t", "time"},
      {"step", "step index"},
      {"energy", "integral of |psi|^2 + |D1 phi|^2 + |D2 phi|^2 + 2/(p+1)|phi|^{p+1}"},
      {"charge", "integral of J0"},
      {"potential", "integral of |phi|^{p+1}"},
      {"weighted_potential", "integral of (1+t+r)^{min((p-1)/2,2)} |phi|^{p+1}"},
      {"conf_total", "integral of (t^2+r^2)/(p+1)|phi|^{p+1} + Q[phi]"},
      {"q_scaling", "1/2 integral |D_S phi + phi|^2, D_S = t psi + x.Dbar phi"},
      {"q_boost1", "1/2 integral |t D1 phi + x1 psi|^2"},
      {"q_boost2", "1/2 integral |t D2 phi + x2 psi|^2"},
      {"q_rotation", "1/2 integral |D_Omega phi|^2, D_Omega = x1 D2 - x2 D1"},
      {"sup_phi", "max |phi| over the grid"},
      {"sup_phi_inner", "max |phi| over |x| <= t/2"},
      {"sup_weighted", "max |phi| (1+t+r)^{1/2}"},
      {"second_energy", "root-sum-square of |D_j D_k phi|_2 (j,k = 1,2) and |D_j psi|_2"},
      {"w1", "|(1+|t-r|) Dbar phi|_2"},
      {"w2", "(1+t) |r^{-1} D_Omega phi|_2"},
      {"phi_l2", "|phi|_2"},
      {"flux_null", "accumulated flux of |D_L1 phi|^2+|D2 phi|^2+2/(p+1)|phi|^{p+1} through t = x1"},
      {"flux_null_weighted", "accumulated flux of x2^2 |D_L1 phi|^2 through t = x1"},
      {"res_coulomb", "max |d1 A1 + d2 A2|"},
      {"res_spatial", "max |d1 A2 - d2 A1 + J0|"},
      {"res_temporal01", "max |dt A1 - d1 A0 - J2|"},
      {"res_temporal02", "max |dt A2 - d2 A0 + J1|"},
      {"temporal_kind", "difference used for dt A: none, centered or backward"},
      {"field_scale", "max |J_mu|"},
      {"cs_force", "max over catalog multipliers of |X^nu F_{gamma nu} J^gamma| / scale"},
  };
  return cols;
}

std::string csv_header() {
  std::string h;
  for (const auto& [name, desc] : diagnostics_columns()) {
    if (!h.empty()) h += ',';
    h += name;
  }
  return h;
}

std::string csv_row(const DiagnosticsRecord& r) {
  std::ostringstream o;
  o << fmt(r.t) << ',' << r.step << ',' << fmt(r.energy) << ',' << fmt(r.charge) << ','
    << fmt(r.potential) << ',' << fmt(r.weighted_potential) << ',' << fmt(r.conf_total);
  for (double q : r.q_parts) o << ',' << fmt(q);
  o << ',' << fmt(r.sup_phi) << ',' << fmt(r.sup_phi_inner) << ',' << fmt(r.sup_weighted) << ','
    << fmt(r.second_energy) << ',' << fmt(r.w1) << ',' << fmt(r.w2) << ',' << fmt(r.phi_l2) << ','
    << fmt(r.flux_null) << ',' << fmt(r.flux_null_weighted) << ',' << fmt(r.res_coulomb) << ','
    << fmt(r.res_spatial) << ',' << fmt(r.res_temporal01) << ',' << fmt(r.res_temporal02) << ','
    << r.temporal_kind << ',' << fmt(r.field_scale) << ',' << fmt(r.cs_force);
  return o.str();
}

std::string schema_text() {
  std::string s = "# diagnostics.csv: one row per diagnostic sample, header row first.\n";
  for (const auto& [name, desc] : diagnostics_columns()) s += name + ": " + desc + "\n";
  return s;
}

CovariantFields covariant_fields(const FieldState& s, const GaugeSolution& G) {
  CovariantFields c{G.d1phi, G.d2phi};
  for (std::size_t k = 0; k < c.d1.size(); ++k) {
    c.d1[k] += cplx(0.0, G.a1[k]) * s.phi[k];
    c.d2[k] += cplx(0.0, G.a2[k]) * s.phi[k];
  }
  return c;
}

double standard_energy(const FieldState& s, const GaugeSolution& G) {
  const CovariantFields c = covariant_fields(s, G);
  const double p = s.p;
  return integrate_pointwise(s, [&](std::size_t k, double, double) {
    return std::norm(s.psi[k]) + std::norm(c.d1[k]) + std::norm(c.d2[k]) +
           2.0 / (p + 1.0) * pot_density(s.phi[k], p);
  });
}

double charge(const FieldState& s) {
  return integrate_pointwise(s, [&](std::size_t k, double, double) {
    return (s.phi[k] * std::conj(s.psi[k])).imag();
  });
}

ConformalCharge conformal_charge(const FieldState& s, const GaugeSolution& G) {
  const CovariantFields c = covariant_fields(s, G);
  const double t = s.t, p = s.p;
  ConformalCharge out;
  out.potential_part = integrate_pointwise(s, [&](std::size_t k, double x1, double x2) {
    return (t * t + x1 * x1 + x2 * x2) / (p + 1.0) * pot_density(s.phi[k], p);
  });
  out.q[0] = 0.5 * integrate_pointwise(s, [&](std::size_t k, double x1, double x2) {
    return std::norm(t * s.psi[k] + x1 * c.d1[k] + x2 * c.d2[k] + s.phi[k]);
  });
  out.q[1] = 0.5 * integrate_pointwise(s, [&](std::size_t k, double x1, double) {
    return std::norm(t * c.d1[k] + x1 * s.psi[k]);
  });
  out.q[2] = 0.5 * integrate_pointwise(s, [&](std::size_t k, double, double x2) {
    return std::norm(t * c.d2[k] + x2 * s.psi[k]);
  });
  out.q[3] = 0.5 * integrate_pointwise(s, [&](std::size_t k, double x1, double x2) {
    return std::norm(x1 * c.d2[k] - x2 * c.d1[k]);
  });
  out.total = out.potential_part + out.q[0] + out.q[1] + out.q[2] + out.q[3];
  return out;
}

double decay_weight_exponent(double p) { return std::min(0.5 * (p - 1.0), 2.0); }

PotentialDecay potential_and_decay(const FieldState& s) {
  const double p = s.p, t = s.t, e = decay_weight_exponent(p);
  PotentialDecay d;
  d.potential = integrate_pointwise(s, [&](std::size_t k, double, double) { return pot_density(s.phi[k], p); });
  d.weighted = integrate_pointwise(s, [&](std::size_t k, double x1, double x2) {
    return std::pow(1.0 + t + std::hypot(x1, x2), e) * pot_density(s.phi[k], p);
  });
  return d;
}

WeightedFirstOrder weighted_first_order(const FieldState& s, const GaugeSolution& G) {
  const CovariantFields c = covariant_fields(s, G);
  const double t = s.t;
  WeightedFirstOrder w;
  w.w1 = std::sqrt(integrate_pointwise(s, [&](std::size_t k, double x1, double x2) {
    const double a = 1.0 + std::abs(t - std::hypot(x1, x2));
    return a * a * (std::norm(c.d1[k]) + std::norm(c.d2[k]));
  }));
  w.w2 = (1.0 + t) * std::sqrt(integrate_pointwise(s, [&](std::size_t k, double x1, double x2) {
    const double r = std::hypot(x1, x2);
    if (r == 0.0) return 0.0;
    return std::norm((x1 / r) * c.d2[k] - (x2 / r) * c.d1[k]);
  }));
  w.phi_l2 = std::sqrt(integrate_pointwise(s, [&](std::size_t k, double, double) { return std::norm(s.phi[k]); }));
  return w;
}

double second_order_energy(const FieldState& s, const GaugeSolution& G) {
  const CovariantFields c = covariant_fields(s, G);
  double sum = 0.0;
  auto add = [&](const ComplexField& f) {
    sum += integrate_pointwise(s, [&](std::size_t k, double, double) { return std::norm(f[k]); });
  };
  add(covariant_derivative(c.d1, G.a1, Axis::x1));
  add(covariant_derivative(c.d1, G.a2, Axis::x2));
  add(covariant_derivative(c.d2, G.a1, Axis::x1));
  add(covariant_derivative(c.d2, G.a2, Axis::x2));
  add(covariant_derivative(s.psi, G.a1, Axis::x1));
  add(covariant_derivative(s.psi, G.a2, Axis::x2));
  return std::sqrt(sum);
}

PointwiseTrackers pointwise_trackers(const FieldState& s) {
  const Grid2D& g = s.grid();
  const int n = g.n();
  const double t = s.t;
  PointwiseTrackers p;
  for (int i1 = 0; i1 < n; ++i1) {
    const double x1 = g.coord(i1);
    for (int i2 = 0; i2 < n; ++i2) {
      const double r = std::hypot(x1, g.coord(i2));
      const double v = std::abs(s.phi(i1, i2));
      p.sup_phi = std::max(p.sup_phi, v);
      if (r <= 0.5 * t) p.sup_phi_inner = std::max(p.sup_phi_inner, v);
      p.sup_weighted = std::max(p.sup_weighted, v * std::sqrt(1.0 + t + r));
    }
  }
  return p;
}

NullLineSample null_line_sample(const FieldState& s, const GaugeSolution& G) {
  NullLineSample out;
  out.t = s.t;
  const Grid2D& g = s.grid();
  if (s.t >= 0.5 * g.L()) return out;
  out.valid = true;
  const CovariantFields c = covariant_fields(s, G);
  const auto phi = interpolate_column(s.phi, s.t);
  const auto psi = interpolate_column(s.psi, s.t);
  const auto d1 = interpolate_column(c.d1, s.t);
  const auto d2 = interpolate_column(c.d2, s.t);
  const int n = g.n();
  std::vector<double> e2(n), e1(n);
  for (int j = 0; j < n; ++j) {
    const double x2 = g.coord(j);
    const double dl = std::norm(psi[j] + d1[j]);
    e2[j] = dl + std::norm(d2[j]) + 2.0 / (s.p + 1.0) * pot_density(phi[j], s.p);
    e1[j] = x2 * x2 * dl;
  }
  out.e2 = integrate_line(g, e2);
  out.e1 = integrate_line(g, e1);
  return out;
}

void null_flux_accumulate(const NullLineSample& prev, const NullLineSample& next, NullFluxAccumulators& acc) {
  if (acc.stopped) return;
  if (!prev.valid || !next.valid) {
    acc.stopped = true;
    acc.cutoff = prev.valid ? prev.t : next.t;
    return;
  }
  const double h = next.t - prev.t;
  acc.flux_null += 0.5 * h * (prev.e2 + next.e2);
  acc.flux_null_weighted += 0.5 * h * (prev.e1 + next.e1);
}

void null_flux_accumulate(const FieldState& prev, const GaugeSolution& Gprev, const FieldState& next,
                          const GaugeSolution& Gnext, NullFluxAccumulators& acc) {
  null_flux_accumulate(null_line_sample(prev, Gprev), null_line_sample(next, Gnext), acc);
}

DiagnosticsRecord compute_record(const FieldState& s, const GaugeSolution& G, int step, const RecordOptions& opt) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.step = step;
  r.energy = standard_energy(s, G);
  r.charge = integrate(G.J.j0);
  const PotentialDecay pd = potential_and_decay(s);
  r.potential = pd.potential;
  r.weighted_potential = pd.weighted;
  if (opt.conformal) {
    const ConformalCharge cc = conformal_charge(s, G);
    r.conf_total = cc.total;
    r.q_parts = cc.q;
  }
  const PointwiseTrackers pt = pointwise_trackers(s);
  r.sup_phi = pt.sup_phi;
  r.sup_phi_inner = pt.sup_phi_inner;
  r.sup_weighted = pt.sup_weighted;
  if (opt.second_energy) r.second_energy = second_order_energy(s, G);
  if (opt.weighted) {
    const WeightedFirstOrder w = weighted_first_order(s, G);
    r.w1 = w.w1;
    r.w2 = w.w2;
    r.phi_l2 = w.phi_l2;
  }
  r.field_scale = std::max({max_abs(G.J.j0), max_abs(G.J.j1), max_abs(G.J.j2)});
  return r;
}

}  // namespace csh
