#include "csh/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csh/initdata.hpp"

namespace csh {

std::string to_string(RateModel m) {
  return m == RateModel::pure_power ? "pure_power" : "power_with_sqrt_log";
}

RateModel rate_model_from_string(const std::string& s) {
  if (s == "pure_power") return RateModel::pure_power;
  if (s == "power_with_sqrt_log") return RateModel::power_with_sqrt_log;
  throw DomainError("unknown rate model '" + s + "' (expected pure_power or power_with_sqrt_log)");
}

RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y, double t_min, double t_max,
                 RateModel model) {
  if (t.size() != y.size()) throw DomainError("fit_rate: t and y differ in length");
  if (!(t_min < t_max)) throw DomainError("fit_rate: empty window");
  std::vector<double> X, Y;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_min || t[k] > t_max) continue;
    if (!(y[k] > 0.0)) throw DomainError("fit_rate: nonpositive value at t = " + std::to_string(t[k]));
    double ly = std::log(y[k]);
    if (model == RateModel::power_with_sqrt_log) ly -= 0.5 * std::log(std::log(2.0 + t[k]));
    X.push_back(std::log1p(t[k]));
    Y.push_back(ly);
  }
  if (X.size() < 8) throw DomainError("fit_rate: " + std::to_string(X.size()) + " samples in window, need 8");
  const double m = static_cast<double>(X.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < X.size(); ++k) {
    mx += X[k];
    my += Y[k];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < X.size(); ++k) {
    sxx += (X[k] - mx) * (X[k] - mx);
    sxy += (X[k] - mx) * (Y[k] - my);
    syy += (Y[k] - my) * (Y[k] - my);
  }
  RateFit f;
  f.model = model;
  f.t_min = t_min;
  f.t_max = t_max;
  f.samples = static_cast<int>(X.size());
  f.exponent = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.exponent * mx;
  double ssr = 0.0;
  for (std::size_t k = 0; k < X.size(); ++k) {
    const double e = Y[k] - (f.intercept + f.exponent * X[k]);
    ssr += e * e;
  }
  // A series that is constant up to roundoff is fitted exactly.
  const double flat_tol = 1e-24 * m * (1.0 + my * my);
  f.r_squared = syy > flat_tol ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  return f;
}

BoundConstant bound_constant(const std::vector<double>& t, const std::vector<double>& y,
                             const std::function<double(double)>& w, double normalizer, double t_min,
                             double t_max) {
  if (!(normalizer > 0.0)) throw DomainError("bound_constant: normalizer must be positive");
  BoundConstant b;
  bool first = true;
  for (std::size_t k = 0; k < t.size() && k < y.size(); ++k) {
    if (t[k] < t_min || t[k] > t_max) continue;
    const double v = w(t[k]) * y[k] / normalizer;
    ++b.samples;
    if (first || v > b.value) {
      b.value = v;
      b.t_arg = t[k];
      first = false;
    }
  }
  return b;
}

WindowBound window_bound(const std::vector<double>& t, const std::vector<double>& y,
                         const std::function<double(double)>& w, double normalizer, double t0, double t1,
                         double t2) {
  WindowBound r;
  r.early = bound_constant(t, y, w, normalizer, t0, t1);
  r.late = bound_constant(t, y, w, normalizer, t1, t2);
  r.finite = r.early.samples > 0 && r.late.samples > 0 && std::isfinite(r.early.value) &&
             std::isfinite(r.late.value);
  r.growth = r.early.value > 0.0 ? r.late.value / r.early.value - 1.0 : (r.late.value > 0.0 ? INFINITY : 0.0);
  return r;
}

LogSobolevResult log_sobolev_check(const RealField& u) {
  const Grid2D& g = u.grid();
  const int n = g.n();
  const ComplexField s = to_spectrum(u);
  // Parseval on the torus: integral |f|^2 = (dx^2 / n^2) sum |f_hat|^2.
  const double norm = g.dx() * g.dx() / (static_cast<double>(n) * n);
  std::vector<double> l2(s.size()), g2(s.size()), h2(s.size());
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) {
      const std::size_t k = g.index(i1, i2);
      const double k1 = g.wavenumber(i1), k2 = g.wavenumber(i2);
      const double ksq = k1 * k1 + k2 * k2;
      const double a = std::norm(s[k]);
      l2[k] = a;
      g2[k] = ksq * a;
      h2[k] = ksq * ksq * a;
    }
  const double u2 = pairwise_sum(l2) * norm;
  LogSobolevResult r;
  r.grad_sq = pairwise_sum(g2) * norm;
  const double hess = pairwise_sum(h2) * norm;
  if (!(r.grad_sq > 0.0)) throw DomainError("log_sobolev_check: zero gradient");
  r.h2 = std::sqrt(u2 + r.grad_sq + hess);
  const double gn = std::sqrt(r.grad_sq);
  r.gated = r.h2 >= std::numbers::e * gn;
  const double sup = max_abs(u);
  r.lhs = sup * sup;
  r.rhs = kLogSobolevConstant * r.grad_sq * std::log(r.h2 / gn);
  r.pass = r.lhs <= r.rhs * (1.0 + 1e-8);
  return r;
}

LogSobolevSuite log_sobolev_suite(const GridPtr& g, int count, std::uint64_t seed, double k_cut) {
  LogSobolevSuite st;
  for (int k = 0; k < count; ++k) {
    const RealField u = random_bandlimited_field(g, seed + static_cast<std::uint64_t>(k), k_cut);
    const LogSobolevResult r = log_sobolev_check(u);
    ++st.fields;
    if (!r.gated) {
      ++st.skipped;
      if (!r.pass) ++st.ungated_failures;
      continue;
    }
    st.worst_ratio = std::max(st.worst_ratio, r.lhs / r.rhs);
    if (r.pass)
      ++st.passed;
    else
      ++st.failed;
  }
  return st;
}

}  // namespace csh
