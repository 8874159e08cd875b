#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "csh/grid.hpp"

namespace csh::testing {

// Smooth random real field: a handful of low modes with random amplitude and
// phase.  Band-limited well inside the dealiasing cutoff.
inline RealField random_smooth(const GridPtr& g, unsigned seed, int kmax = 5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> amp(0.0, 1.0);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
  RealField f(g);
  const double L = g->L();
  for (int a = -kmax; a <= kmax; ++a) {
    for (int b = 0; b <= kmax; ++b) {
      const double c = amp(rng) / (1.0 + a * a + b * b);
      const double phase = ph(rng);
      const double k1 = 2.0 * std::numbers::pi * a / L;
      const double k2 = 2.0 * std::numbers::pi * b / L;
      for (int i1 = 0; i1 < g->n(); ++i1)
        for (int i2 = 0; i2 < g->n(); ++i2)
          f(i1, i2) += c * std::cos(k1 * g->coord(i1) + k2 * g->coord(i2) + phase);
    }
  }
  return f;
}

inline ComplexField random_smooth_complex(const GridPtr& g, unsigned seed, int kmax = 5) {
  RealField re = random_smooth(g, seed, kmax);
  RealField im = random_smooth(g, seed + 7919, kmax);
  ComplexField z(g);
  for (std::size_t k = 0; k < z.size(); ++k) z[k] = cplx(re[k], im[k]);
  return z;
}

template <class A, class B>
double max_diff(const A& a, const B& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace csh::testing
