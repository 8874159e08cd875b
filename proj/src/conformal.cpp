#include "csh/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "csh/io.hpp"

namespace csh {

bool in_source_domain(double t, double x1, double x2) {
  const double ts = t + 2.0;
  const double lam = ts * ts - x1 * x1 - x2 * x2;
  return ts > 0.0 && lam >= ts * (1.0 - 1e-12);
}

bool in_image_cone(double tt, double xt1, double xt2) {
  return tt >= -1e-14 && tt + std::hypot(xt1, xt2) < 1.0;
}

ConformalPoint forward_map(double t, double x1, double x2) {
  if (!in_source_domain(t, x1, x2))
    throw DomainError("forward_map: (" + format_double(t) + ", " + format_double(x1) + ", " + format_double(x2) +
                      ") lies outside (t+2)^2 - |x|^2 >= t+2");
  ConformalPoint c{t, x1, x2};
  const double ts = t + 2.0;
  c.lambda = ts * ts - x1 * x1 - x2 * x2;
  c.tt = 1.0 - ts / c.lambda;
  c.xt1 = x1 / c.lambda;
  c.xt2 = x2 / c.lambda;
  return c;
}

ConformalPoint inverse_map(double tt, double xt1, double xt2) {
  if (!in_image_cone(tt, xt1, xt2))
    throw DomainError("inverse_map: (" + format_double(tt) + ", " + format_double(xt1) + ", " + format_double(xt2) +
                      ") lies outside the cone tt + |xt| < 1, tt >= 0");
  ConformalPoint c;
  c.tt = tt;
  c.xt1 = xt1;
  c.xt2 = xt2;
  const double y0 = 1.0 - tt;
  c.lambda = 1.0 / (y0 * y0 - xt1 * xt1 - xt2 * xt2);
  c.t = y0 * c.lambda - 2.0;
  c.x1 = xt1 * c.lambda;
  c.x2 = xt2 * c.lambda;
  return c;
}

Jacobian3 inverse_jacobian(double tt, double xt1, double xt2) {
  // x^nu = y^nu Lambda with y = (1 - tt, xt) and Lambda = 1/(y0^2 - |y|^2).
  const double y[3] = {1.0 - tt, xt1, xt2};
  const double lam = 1.0 / (y[0] * y[0] - y[1] * y[1] - y[2] * y[2]);
  const double dlam[3] = {-2.0 * lam * lam * y[0], 2.0 * lam * lam * y[1], 2.0 * lam * lam * y[2]};
  Jacobian3 J{};
  for (int nu = 0; nu < 3; ++nu)
    for (int a = 0; a < 3; ++a) {
      const double dy = (nu == a ? lam : 0.0) + y[nu] * dlam[a];
      J[nu][a] = a == 0 ? -dy : dy;
    }
  return J;
}

SnapshotSeries::SnapshotSeries(const RunArchive& run, int stride, int order) : order_(order) {
  if (stride < 1) throw DomainError("SnapshotSeries: stride must be >= 1");
  if (order < 2) throw DomainError("SnapshotSeries: interpolation order must be >= 2");
  const auto& snaps = run.snapshots();
  if (snaps.size() < 2) throw DomainError(run.dir().string() + ": need at least two snapshots");
  flat_ = run.config().flat;
  nonlinear_ = run.config().nonlinear;
  p_ = run.config().p;
  grid_ = run.grid();
  for (std::size_t k = 0; k < snaps.size(); k += static_cast<std::size_t>(stride)) {
    FieldState s = run.load(snaps[k]);
    times_.push_back(s.t);
    A_.push_back(solve_gauge(s, flat_));
    phi_.push_back(std::move(s.phi));
  }
  if (times_.size() < 2) throw DomainError("SnapshotSeries: stride leaves fewer than two snapshots");
}

double SnapshotSeries::spacing() const { return (times_.back() - times_.front()) / (times_.size() - 1); }

SnapshotSeries::Value SnapshotSeries::at(double t, double x1, double x2) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(t_max()));
  if (t < t_min() - tol || t > t_max() + tol)
    throw DomainError("time " + format_double(t) + " outside stored snapshots [" + format_double(t_min()) + ", " +
                      format_double(t_max()) + "]");
  const int M = static_cast<int>(times_.size());
  const int m = std::min(order_, M);
  const int idx = static_cast<int>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin()) - 1;
  const int j0 = std::clamp(idx - m / 2 + 1, 0, M - m);

  std::vector<double> lw(m, 1.0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (a != b) lw[a] *= (t - times_[j0 + b]) / (times_[j0 + a] - times_[j0 + b]);

  const Grid2D& g = *grid_;
  const int n = g.n();
  const auto w1 = cardinal_weights(g, x1);
  const auto w2 = cardinal_weights(g, x2);
  auto point = [&](const auto& f) {
    using T = std::decay_t<decltype(f[0])>;
    T acc{};
    for (int i1 = 0; i1 < n; ++i1) {
      if (w1[i1] == 0.0) continue;
      const T* row = f.data() + g.index(i1, 0);
      T r{};
      for (int i2 = 0; i2 < n; ++i2) r += w2[i2] * row[i2];
      acc += w1[i1] * r;
    }
    return acc;
  };

  Value v{};
  for (int a = 0; a < m; ++a) {
    const int j = j0 + a;
    v.phi += lw[a] * point(phi_[j]);
    if (!flat_) {
      const GaugePotential& A = A_[j];
      v.A[0] += lw[a] * (point(A.a0) + A.bg.a0(x1, x2));
      v.A[1] += lw[a] * (point(A.a1) + A.bg.a1(x1, x2));
      v.A[2] += lw[a] * (point(A.a2) + A.bg.a2(x1, x2));
    }
  }
  return v;
}

std::vector<cplx> transformed_field(const SnapshotSeries& series, const std::vector<ImagePoint>& pts) {
  std::vector<cplx> out;
  out.reserve(pts.size());
  for (const auto& q : pts) {
    const ConformalPoint c = inverse_map(q.tt, q.xt1, q.xt2);
    out.push_back(std::sqrt(c.lambda) * series.at(c.t, c.x1, c.x2).phi);
  }
  return out;
}

namespace {

struct ImageValue {
  cplx phi;                   // phi~
  std::array<double, 3> A{};  // A~ in image coordinates
};

bool admissible(double tt, double xt1, double xt2, double margin) {
  return tt >= 0.0 && tt + std::hypot(xt1, xt2) <= 1.0 - margin;
}

ImageValue image_value(const SnapshotSeries& series, double tt, double xt1, double xt2, double margin,
                       double half_box) {
  if (!admissible(tt, xt1, xt2, margin))
    throw DomainError("stencil point (" + format_double(tt) + ", " + format_double(xt1) + ", " +
                      format_double(xt2) + ") leaves the image cone minus its margin");
  const ConformalPoint c = inverse_map(tt, xt1, xt2);
  if (std::abs(c.x1) > half_box || std::abs(c.x2) > half_box)
    throw DomainError("stencil preimage leaves the computational box");
  const SnapshotSeries::Value v = series.at(c.t, c.x1, c.x2);
  ImageValue out;
  out.phi = std::sqrt(c.lambda) * v.phi;
  if (!series.flat()) {
    const Jacobian3 J = inverse_jacobian(tt, xt1, xt2);
    for (int a = 0; a < 3; ++a)
      out.A[a] = v.A[0] * J[0][a] + v.A[1] * J[1][a] + v.A[2] * J[2][a];
  }
  return out;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

double SnapshotSeries::half_box() const { return 0.5 * grid_->L(); }

ResidualStats transformed_equation_residual(const SnapshotSeries& series, const std::vector<ImagePoint>& pts,
                                            const ResidualOptions& opt) {
  const double h = opt.h;
  const double p = series.p();
  const cplx I(0.0, 1.0);
  std::vector<double> raw, nl_mag, d2_mag;
  for (const auto& q : pts) {
    const double c0[3] = {q.tt, q.xt1, q.xt2};
    auto at = [&](int axis, int k) {
      double y[3] = {c0[0], c0[1], c0[2]};
      y[axis] += k * h;
      return image_value(series, y[0], y[1], y[2], opt.margin, series.half_box());
    };
    const ImageValue mid = at(0, 0);
    cplx box = 0.0;
    double d2max = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      const ImageValue m2 = at(axis, -2), m1 = at(axis, -1), p1 = at(axis, 1), p2 = at(axis, 2);
      const cplx d1 = (-p2.phi + 8.0 * p1.phi - 8.0 * m1.phi + m2.phi) / (12.0 * h);
      const cplx d2 = (-p2.phi + 16.0 * p1.phi - 30.0 * mid.phi + 16.0 * m1.phi - m2.phi) / (12.0 * h * h);
      const double a = mid.A[axis];
      const double da = (-p2.A[axis] + 8.0 * p1.A[axis] - 8.0 * m1.A[axis] + m2.A[axis]) / (12.0 * h);
      const cplx dd = d2 + 2.0 * I * a * d1 + I * da * mid.phi - a * a * mid.phi;
      box += axis == 0 ? -dd : dd;
      d2max = std::max(d2max, std::abs(d2));
    }
    const ConformalPoint c = inverse_map(q.tt, q.xt1, q.xt2);
    cplx nl = 0.0;
    if (series.nonlinear())
      nl = std::pow(c.lambda, 0.5 * (5.0 - p)) * std::pow(std::abs(mid.phi), p - 1.0) * mid.phi;
    raw.push_back(std::abs(box - nl));
    nl_mag.push_back(std::abs(nl));
    d2_mag.push_back(d2max);
  }
  ResidualStats st;
  st.samples = static_cast<int>(pts.size());
  st.scale = raw.empty() ? 0.0 : *std::max_element(nl_mag.begin(), nl_mag.end());
  if (st.scale == 0.0 && !raw.empty()) st.scale = *std::max_element(d2_mag.begin(), d2_mag.end());
  for (double r : raw) st.residuals.push_back(st.scale > 0.0 ? r / st.scale : 0.0);
  if (!st.residuals.empty()) st.max = *std::max_element(st.residuals.begin(), st.residuals.end());
  st.median = median_of(st.residuals);
  return st;
}

std::vector<ImagePoint> sample_image_cone(const SnapshotSeries& series, double L, int count, std::uint64_t seed,
                                          double h_max, double margin) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double guard = 3.0 * series.spacing();
  const double t_lo = series.t_min() + guard, t_hi = series.t_max() - guard;
  std::vector<ImagePoint> out;
  const long max_tries = 2000L * std::max(count, 1);
  for (long tries = 0; static_cast<int>(out.size()) < count && tries < max_tries; ++tries) {
    const double tt = u(rng) * (1.0 - margin);
    const double rad = (1.0 - margin - tt) * std::sqrt(u(rng));
    const double th = 2.0 * std::numbers::pi * u(rng);
    const ImagePoint q{tt, rad * std::cos(th), rad * std::sin(th)};
    bool ok = true;
    for (int axis = 0; axis < 3 && ok; ++axis)
      for (int k = -2; k <= 2 && ok; ++k) {
        double y[3] = {q.tt, q.xt1, q.xt2};
        y[axis] += k * h_max;
        if (!admissible(y[0], y[1], y[2], margin)) {
          ok = false;
          break;
        }
        const ConformalPoint c = inverse_map(y[0], y[1], y[2]);
        ok = c.t >= t_lo && c.t <= t_hi && std::abs(c.x1) < 0.5 * L && std::abs(c.x2) < 0.5 * L;
      }
    if (ok) out.push_back(q);
  }
  if (static_cast<int>(out.size()) < count)
    throw DomainError("sample_image_cone: only " + std::to_string(out.size()) + " admissible points of " +
                      std::to_string(count) + " requested");
  return out;
}

RefinementStudy residual_refinement(const RunArchive& run, int count, std::uint64_t seed, double h0,
                                    const std::vector<int>& strides, double margin) {
  if (strides.size() < 2) throw DomainError("residual_refinement: need at least two levels");
  RefinementStudy rs;
  rs.strides = strides;
  const int coarsest = *std::max_element(strides.begin(), strides.end());
  std::vector<ImagePoint> pts;
  {
    const SnapshotSeries coarse(run, coarsest);
    pts = sample_image_cone(coarse, run.config().L, count, seed, h0 * coarsest, margin);
  }
  for (int s : strides) {
    const SnapshotSeries series(run, s);
    ResidualOptions o;
    o.h = h0 * s;
    o.margin = margin;
    const ResidualStats st = transformed_equation_residual(series, pts, o);
    rs.h.push_back(o.h);
    rs.median.push_back(st.median);
    rs.max.push_back(st.max);
  }
  const std::size_t k = rs.median.size() - 1;
  const double ratio = rs.h[k - 1] / rs.h[k];
  rs.order = (rs.median[k] > 0.0 && rs.median[k - 1] > 0.0) ? std::log(rs.median[k - 1] / rs.median[k]) / std::log(ratio)
                                                           : 0.0;
  return rs;
}

double normalized_image_bound(const SnapshotSeries& series, const std::vector<ImagePoint>& pts, double eps) {
  const double p = series.p();
  const auto vals = transformed_field(series, pts);
  double m = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k)
    m = std::max(m, std::abs(vals[k]) * std::pow(1.0 - pts[k].tt, (5.0 - p + eps) / (p + 1.0)));
  return m;
}

}  // namespace csh
