#include "csh/initdata.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "csh/gauge.hpp"

namespace csh {

namespace {

constexpr double kTail = 1e-16;

double radial_profile(const InitialDataSpec& s, double r) {
  const double sig = s.width;
  const int w = std::abs(s.winding);
  switch (s.family) {
    case Family::gaussian:
    case Family::random_bandlimited:
      return std::pow(r / sig, w) * std::exp(-(r * r) / (sig * sig));
    case Family::ring: {
      const double d = r - s.ring_radius;
      return std::pow(r / s.ring_radius, w) * std::exp(-(d * d) / (sig * sig));
    }
    case Family::bump: {
      const double u = r / sig;
      if (u >= 1.0) return 0.0;
      return std::pow(u, w) * std::exp(1.0 - 1.0 / (1.0 - u * u));
    }
  }
  return 0.0;
}

// (y1 + i y2)^w / |y|^|w|, i.e. e^{i w theta}; 1 at the origin.
cplx winding_phase(int w, double y1, double y2) {
  if (w == 0) return 1.0;
  const double r = std::hypot(y1, y2);
  if (r == 0.0) return 1.0;
  const cplx z(y1 / r, (w > 0 ? y2 : -y2) / r);
  return std::pow(z, std::abs(w));
}

ComplexField random_modes(const GridPtr& g, std::uint64_t seed, double k_cut) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  ComplexField s(g);
  const int n = g->n();
  // Traverse modes in storage order so the draw sequence is fixed.
  for (int m1 = 0; m1 < n; ++m1)
    for (int m2 = 0; m2 < n; ++m2) {
      const double k1 = g->wavenumber(m1), k2 = g->wavenumber(m2);
      if (g->nyquist(m1) || g->nyquist(m2)) continue;
      if (k1 * k1 + k2 * k2 > k_cut * k_cut) continue;
      const double re = N(rng), im = N(rng);
      s(m1, m2) = cplx(re, im);
    }
  return from_spectrum_complex(std::move(s));
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::ring: return "ring";
    case Family::bump: return "bump";
    case Family::random_bandlimited: return "random_bandlimited";
  }
  return "?";
}

std::string to_string(Velocity v) {
  switch (v) {
    case Velocity::zero: return "zero";
    case Velocity::i_phi: return "i_phi";
    case Velocity::random: return "random";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "gaussian") return Family::gaussian;
  if (s == "ring") return Family::ring;
  if (s == "bump") return Family::bump;
  if (s == "random_bandlimited") return Family::random_bandlimited;
  throw DomainError("unknown data family '" + s + "'");
}

Velocity velocity_from_string(const std::string& s) {
  if (s == "zero") return Velocity::zero;
  if (s == "i_phi") return Velocity::i_phi;
  if (s == "random") return Velocity::random;
  throw DomainError("unknown velocity profile '" + s + "'");
}

double InitialDataSpec::profile_radius() const {
  if (family == Family::bump) return width;
  // Scan outward from the peak until the profile drops below kTail of it.
  const double step = 1e-3 * width;
  const double rmax = (family == Family::ring ? ring_radius : 0.0) + 60.0 * width;
  double peak = 0.0;
  for (double r = 0.0; r <= rmax; r += step) peak = std::max(peak, radial_profile(*this, r));
  double last = 0.0;
  for (double r = 0.0; r <= rmax; r += step)
    if (radial_profile(*this, r) > kTail * peak) last = r;
  return last + step;
}

double InitialDataSpec::support_radius() const {
  return profile_radius() + std::hypot(center1, center2);
}

void validate(const InitialDataSpec& spec) {
  if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude))
    throw DomainError("data.amplitude must be a finite value >= 0");
  if (!(spec.width > 0.0) || !std::isfinite(spec.width)) throw DomainError("data.width must be positive");
  if (spec.family == Family::ring && !(spec.ring_radius > 0.0))
    throw DomainError("data.ring_radius must be positive");
  if (spec.family == Family::random_bandlimited && !(spec.k_cut > 0.0))
    throw DomainError("data.k_cut must be positive");
}

FieldState build_data(const InitialDataSpec& spec, const GridPtr& g, double p) {
  validate(spec);
  const double R = spec.support_radius();
  if (R > 0.5 * g->L() - kSupportMargin)
    throw DomainError("data support radius " + std::to_string(R) + " exceeds L/2 - margin");
  FieldState s = make_state(g, p, 0.0);
  const int n = g->n();

  ComplexField carrier, carrier_v;
  if (spec.family == Family::random_bandlimited) {
    carrier = random_modes(g, spec.seed, spec.k_cut);
    if (spec.velocity == Velocity::random) carrier_v = random_modes(g, spec.seed + 1, spec.k_cut);
  }

  for (int i1 = 0; i1 < n; ++i1) {
    const double y1 = g->coord(i1) - spec.center1;
    for (int i2 = 0; i2 < n; ++i2) {
      const double y2 = g->coord(i2) - spec.center2;
      const double r = std::hypot(y1, y2);
      const cplx v = radial_profile(spec, r) * winding_phase(spec.winding, y1, y2);
      const std::size_t k = g->index(i1, i2);
      s.phi[k] = carrier.empty() ? v : v * carrier[k];
      if (spec.velocity == Velocity::random) {
        s.psi[k] = carrier_v.empty() ? v : v * carrier_v[k];
      }
    }
  }
  // Amplitude: peak modulus of phi equals a (bump and gaussian with w = 0 are
  // already unit-peak; the rest are normalized on the grid).
  const bool unit_peak = (spec.family == Family::gaussian || spec.family == Family::bump) && spec.winding == 0;
  double scale = spec.amplitude;
  if (!unit_peak) {
    const double m = max_abs(s.phi);
    scale = m > 0.0 ? spec.amplitude / m : 0.0;
  }
  double scale_v = scale;
  if (spec.velocity == Velocity::random) {
    const double m = max_abs(s.psi);
    scale_v = m > 0.0 ? spec.amplitude / m : 0.0;
  }
  for (std::size_t k = 0; k < s.phi.size(); ++k) {
    s.phi[k] *= scale;
    switch (spec.velocity) {
      case Velocity::zero: s.psi[k] = 0.0; break;
      case Velocity::i_phi: s.psi[k] = cplx(0.0, 1.0) * s.phi[k]; break;
      case Velocity::random: s.psi[k] *= scale_v; break;
    }
  }
  return s;
}

RealField random_bandlimited_field(const GridPtr& g, std::uint64_t seed, double k_cut) {
  const ComplexField z = random_modes(g, seed, k_cut);
  RealField out(g);
  for (std::size_t k = 0; k < z.size(); ++k) out[k] = z[k].real();
  return out;
}

EnergyNorms energy_norms(const FieldState& s, int k_max, bool flat) {
  const GaugeSolution G = solve_gauge_detailed(s, flat);
  const Grid2D& g = s.grid();
  const int n = g.n();
  const double p = s.p;

  ComplexField d1 = G.d1phi, d2 = G.d2phi;
  for (std::size_t k = 0; k < d1.size(); ++k) {
    d1[k] += cplx(0.0, G.a1[k]) * s.phi[k];
    d2[k] += cplx(0.0, G.a2[k]) * s.phi[k];
  }
  RealField first(s.grid_ptr()), pot(s.grid_ptr()), second(s.grid_ptr());
  for (std::size_t k = 0; k < first.size(); ++k) {
    first[k] = std::norm(d1[k]) + std::norm(d2[k]) + std::norm(s.psi[k]);
    pot[k] = std::pow(std::abs(s.phi[k]), p + 1.0);
  }
  if (k_max >= 1) {
    const ComplexField d11 = covariant_derivative(d1, G.a1, Axis::x1);
    const ComplexField d21 = covariant_derivative(d1, G.a2, Axis::x2);
    const ComplexField d12 = covariant_derivative(d2, G.a1, Axis::x1);
    const ComplexField d22 = covariant_derivative(d2, G.a2, Axis::x2);
    const ComplexField v1 = covariant_derivative(s.psi, G.a1, Axis::x1);
    const ComplexField v2 = covariant_derivative(s.psi, G.a2, Axis::x2);
    for (std::size_t k = 0; k < second.size(); ++k)
      second[k] = std::norm(d11[k]) + std::norm(d21[k]) + std::norm(d12[k]) + std::norm(d22[k]) +
                  std::norm(v1[k]) + std::norm(v2[k]);
  }

  RealField w0(s.grid_ptr()), w2(s.grid_ptr()), w10(s.grid_ptr());
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      const std::size_t k = g.index(i1, i2);
      const double rho = 1.0 + std::hypot(g.coord(i1), g.coord(i2));
      w0[k] = first[k] + pot[k];
      w2[k] = rho * rho * (first[k] + pot[k]);
      // Potential term counted once in E_{1,0}.
      w10[k] = first[k] + pot[k] + rho * rho * second[k];
    }
  EnergyNorms e;
  e.e00 = integrate(w0);
  e.e02 = integrate(w2);
  e.e10 = k_max >= 1 ? integrate(w10) : 0.0;
  return e;
}

FieldState transform(const FieldState& s, Symmetry op, double theta) {
  if (s.t != 0.0) throw DomainError("transform: only defined on data at t = 0");
  FieldState out = s;
  const Grid2D& g = s.grid();
  const int n = g.n();
  switch (op) {
    case Symmetry::constant_phase: {
      const cplx rot = std::polar(1.0, theta);
      for (auto& v : out.phi.values()) v *= rot;
      for (auto& v : out.psi.values()) v *= rot;
      break;
    }
    case Symmetry::rotate90:
      // new(x1, x2) = old(x2, -x1): rotation by +90 degrees.
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
          const int j1 = i2, j2 = (n - i1) % n;
          out.phi(i1, i2) = s.phi(j1, j2);
          out.psi(i1, i2) = s.psi(j1, j2);
        }
      break;
    case Symmetry::reflect_x1:
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2) {
          const int j1 = (n - i1) % n;
          out.phi(i1, i2) = s.phi(j1, i2);
          out.psi(i1, i2) = s.psi(j1, i2);
        }
      break;
  }
  return out;
}

}  // namespace csh
