#include "csh/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

namespace csh {

namespace {

// FFTW's planner is not thread safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kMeanTol = 1e-8;

}  // namespace

struct Grid2D::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

Grid2D::Grid2D(int n, double L) : n_(n), L_(L), dx_(L / n), plans_(std::make_unique<Plans>()) {
  if (n < 32 || (n & (n - 1)) != 0)
    throw DomainError("grid: n must be a power of two >= 32, got " + std::to_string(n));
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("grid: L must be positive and finite");
  std::lock_guard lock(planner_mutex());
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size()));
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->fwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, flags);
  plans_->bwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, flags);
  fftw_free(buf);
  if (!plans_->fwd || !plans_->bwd) throw Error("grid: FFTW planning failed");
}

Grid2D::~Grid2D() {
  std::lock_guard lock(planner_mutex());
  if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
  if (plans_->bwd) fftw_destroy_plan(plans_->bwd);
}

double Grid2D::wavenumber(int m) const noexcept {
  return 2.0 * std::numbers::pi * mode(m) / L_;
}

void Grid2D::forward(cplx* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plans_->fwd, p, p);
}

void Grid2D::backward(cplx* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plans_->bwd, p, p);
  const double s = 1.0 / static_cast<double>(size());
  for (std::size_t k = 0; k < size(); ++k) data[k] *= s;
}

GridPtr make_grid(int n, double L) { return std::make_shared<const Grid2D>(n, L); }

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* what) {
  if (!a.same_shape(b)) throw DomainError(std::string(what) + ": grid mismatch");
}

void require_finite(const RealField& f, const char* what) {
  for (double v : f.values())
    if (!std::isfinite(v)) throw NonFiniteError(std::string(what) + ": non-finite value");
}

void require_finite(const ComplexField& f, const char* what) {
  for (const cplx& v : f.values())
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NonFiniteError(std::string(what) + ": non-finite value");
}

ComplexField to_spectrum(const RealField& f) {
  ComplexField s(f.grid_ptr());
  for (std::size_t k = 0; k < f.size(); ++k) s[k] = f[k];
  f.grid().forward(s.data());
  return s;
}

ComplexField to_spectrum(const ComplexField& f) {
  ComplexField s = f;
  f.grid().forward(s.data());
  return s;
}

ComplexField from_spectrum_complex(ComplexField s) {
  s.grid().backward(s.data());
  return s;
}

RealField from_spectrum_real(ComplexField s) {
  s.grid().backward(s.data());
  RealField out(s.grid_ptr());
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = s[k].real();
  return out;
}

void apply_derivative(ComplexField& s, Axis axis) {
  const Grid2D& g = s.grid();
  const int n = g.n();
  for (int m1 = 0; m1 < n; ++m1) {
    for (int m2 = 0; m2 < n; ++m2) {
      const int m = axis == Axis::x1 ? m1 : m2;
      cplx& c = s(m1, m2);
      if (g.nyquist(m))
        c = 0.0;
      else
        c = cplx(-c.imag(), c.real()) * g.wavenumber(m);
    }
  }
}

void apply_laplacian(ComplexField& s) {
  const Grid2D& g = s.grid();
  const int n = g.n();
  for (int m1 = 0; m1 < n; ++m1) {
    const double k1 = g.wavenumber(m1);
    for (int m2 = 0; m2 < n; ++m2) {
      const double k2 = g.wavenumber(m2);
      s(m1, m2) *= -(k1 * k1 + k2 * k2);
    }
  }
}

void apply_inverse_laplacian(ComplexField& s) {
  const Grid2D& g = s.grid();
  const int n = g.n();
  // Parseval: sum |f|^2 = sum |s|^2 / n^2.  mean = s(0,0) / n^2.
  double energy = 0.0;
  for (const cplx& c : s.values()) energy += std::norm(c);
  const double nn = static_cast<double>(g.size());
  const double l2 = std::sqrt(energy / nn) * g.dx();
  const double meanv = std::abs(s(0, 0)) / nn;
  if (meanv * g.L() * g.L() > kMeanTol * l2 * g.L() && meanv > 0.0)
    throw NonSolvableSourceError("non-solvable source: Poisson source has nonzero mean " +
                                 std::to_string(meanv));
  for (int m1 = 0; m1 < n; ++m1) {
    const double k1 = g.wavenumber(m1);
    for (int m2 = 0; m2 < n; ++m2) {
      const double k2 = g.wavenumber(m2);
      const double kk = k1 * k1 + k2 * k2;
      s(m1, m2) = kk > 0.0 ? s(m1, m2) / -kk : cplx(0.0);
    }
  }
}

void apply_dealias(ComplexField& s) {
  const Grid2D& g = s.grid();
  const int n = g.n();
  const int cut = g.dealias_cutoff();
  for (int m1 = 0; m1 < n; ++m1) {
    const bool drop1 = std::abs(g.mode(m1)) > cut;
    for (int m2 = 0; m2 < n; ++m2)
      if (drop1 || std::abs(g.mode(m2)) > cut) s(m1, m2) = 0.0;
  }
}

RealField spectral_derivative(const RealField& f, Axis axis) {
  require_finite(f, "spectral_derivative");
  ComplexField s = to_spectrum(f);
  apply_derivative(s, axis);
  return from_spectrum_real(std::move(s));
}

ComplexField spectral_derivative(const ComplexField& f, Axis axis) {
  require_finite(f, "spectral_derivative");
  ComplexField s = to_spectrum(f);
  apply_derivative(s, axis);
  return from_spectrum_complex(std::move(s));
}

RealField laplacian(const RealField& f) {
  require_finite(f, "laplacian");
  ComplexField s = to_spectrum(f);
  apply_laplacian(s);
  return from_spectrum_real(std::move(s));
}

ComplexField laplacian(const ComplexField& f) {
  require_finite(f, "laplacian");
  ComplexField s = to_spectrum(f);
  apply_laplacian(s);
  return from_spectrum_complex(std::move(s));
}

RealField inverse_laplacian_zero_mean(const RealField& f) {
  require_finite(f, "inverse_laplacian_zero_mean");
  ComplexField s = to_spectrum(f);
  apply_inverse_laplacian(s);
  return from_spectrum_real(std::move(s));
}

RealField dealias(const RealField& f) {
  ComplexField s = to_spectrum(f);
  apply_dealias(s);
  return from_spectrum_real(std::move(s));
}

ComplexField dealias(const ComplexField& f) {
  ComplexField s = to_spectrum(f);
  apply_dealias(s);
  return from_spectrum_complex(std::move(s));
}

std::vector<double> cardinal_weights(const Grid2D& g, double x) {
  const int n = g.n();
  std::vector<double> w(n, 0.0);
  const double pos = (x - g.coord(0)) / g.dx();
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < 1e-12) {
    int i = static_cast<int>(nearest) % n;
    if (i < 0) i += n;
    w[i] = 1.0;
    return w;
  }
  const double pi = std::numbers::pi;
  for (int i = 0; i < n; ++i) {
    // theta = 2 pi (x - x_i) / L, n theta / 2 = pi (pos - i)
    const double d = pos - i;
    const double half = pi * d / n;
    w[i] = std::sin(pi * d) / (n * std::tan(half));
  }
  return w;
}

namespace {

void check_column_x1(const Grid2D& g, double x1) {
  if (!(x1 >= -0.5 * g.L() && x1 < 0.5 * g.L()))
    throw DomainError("interpolate_column: x1 outside [-L/2, L/2)");
}

template <class T>
std::vector<T> column_impl(const Field<T>& f, double x1) {
  const Grid2D& g = f.grid();
  check_column_x1(g, x1);
  const int n = g.n();
  const auto w = cardinal_weights(g, x1);
  std::vector<T> col(n, T{});
  for (int i1 = 0; i1 < n; ++i1) {
    if (w[i1] == 0.0) continue;
    const T* row = f.data() + g.index(i1, 0);
    for (int i2 = 0; i2 < n; ++i2) col[i2] += w[i1] * row[i2];
  }
  return col;
}

template <class T>
T point_impl(const Field<T>& f, double x1, double x2) {
  const Grid2D& g = f.grid();
  const int n = g.n();
  const auto w1 = cardinal_weights(g, x1);
  const auto w2 = cardinal_weights(g, x2);
  T acc{};
  for (int i1 = 0; i1 < n; ++i1) {
    if (w1[i1] == 0.0) continue;
    const T* row = f.data() + g.index(i1, 0);
    T r{};
    for (int i2 = 0; i2 < n; ++i2) r += w2[i2] * row[i2];
    acc += w1[i1] * r;
  }
  return acc;
}

constexpr int kEndPoints = 8;

// Solve a small dense system in place by Gaussian elimination with partial
// pivoting.
template <int M>
std::array<long double, M> solve_dense(std::array<std::array<long double, M>, M> a,
                                       std::array<long double, M> b) {
  for (int c = 0; c < M; ++c) {
    int piv = c;
    for (int r = c + 1; r < M; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < M; ++r) {
      const long double f = a[r][c] / a[c][c];
      for (int k = c; k < M; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::array<long double, M> x{};
  for (int r = M - 1; r >= 0; --r) {
    long double s = b[r];
    for (int k = r + 1; k < M; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

// End weights w_0..w_{M-1} for a rule with unit interior weights, exact for
// polynomials of degree < M.  The corrections c_j = w_j - 1 cancel the
// Euler-Maclaurin end terms: sum_j c_j j^d = -1/2 (d = 0), B_{d+1}/(d+1)
// (d odd), 0 otherwise.
const std::array<double, kEndPoints>& end_weights() {
  static const std::array<double, kEndPoints> w = [] {
    constexpr int M = kEndPoints;
    static constexpr long double bernoulli[] = {1.0L, -0.5L, 1.0L / 6, 0.0L, -1.0L / 30, 0.0L,
                                                1.0L / 42, 0.0L, -1.0L / 30};
    std::array<std::array<long double, M>, M> a{};
    std::array<long double, M> b{};
    for (int d = 0; d < M; ++d) {
      for (int j = 0; j < M; ++j) {
        long double v = 1.0L;
        for (int e = 0; e < d; ++e) v *= j;
        a[d][j] = v;
      }
      b[d] = d == 0 ? -0.5L : (d % 2 == 1 ? bernoulli[d + 1] / (d + 1) : 0.0L);
    }
    const auto c = solve_dense<M>(a, b);
    std::array<double, M> out{};
    for (int j = 0; j < M; ++j) out[j] = static_cast<double>(1.0L + c[j]);
    return out;
  }();
  return w;
}

// Integral over [0, s] of the Lagrange basis polynomials on nodes
// 0, -1, ..., -(M-1) (units of dx), in node order.
std::array<double, kEndPoints> partial_cell_weights(double s) {
  constexpr int M = kEndPoints;
  std::array<double, M> out{};
  for (int j = 0; j < M; ++j) {
    double c[M] = {1.0};
    for (int d = 1; d < M; ++d) c[d] = 0.0;
    double denom = 1.0;
    int deg = 0;
    for (int m = 0; m < M; ++m) {
      if (m == j) continue;
      const double node = -m;
      denom *= static_cast<double>(-j) - node;
      for (int d = deg + 1; d >= 1; --d) c[d] = c[d - 1] - node * c[d];
      c[0] *= -node;
      ++deg;
    }
    double integral = 0.0;
    double sp = s;
    for (int d = 0; d < M; ++d) {
      integral += c[d] * sp / (d + 1);
      sp *= s;
    }
    out[j] = integral / denom;
  }
  return out;
}

}  // namespace

std::vector<double> interpolate_column(const RealField& f, double x1) { return column_impl(f, x1); }
std::vector<cplx> interpolate_column(const ComplexField& f, double x1) { return column_impl(f, x1); }

double evaluate_at(const RealField& f, double x1, double x2) { return point_impl(f, x1, x2); }
cplx evaluate_at(const ComplexField& f, double x1, double x2) { return point_impl(f, x1, x2); }

double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t block = 16;
  if (v.size() <= block) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

double integrate(const RealField& f) {
  const double dx = f.grid().dx();
  return pairwise_sum(f.values()) * dx * dx;
}

double integrate_line(const Grid2D& g, std::span<const double> column) {
  return pairwise_sum(column) * g.dx();
}

double halfplane_integrate(const RealField& f, double c, HalfPlane side) {
  const Grid2D& g = f.grid();
  const int n = g.n();
  const double dx = g.dx();
  std::vector<double> rows(n);
  for (int i1 = 0; i1 < n; ++i1)
    rows[i1] = pairwise_sum(std::span<const double>(f.data() + g.index(i1, 0), n)) * dx;

  const double pos = (c - g.coord(0)) / dx;
  // Walk the region from the cut outward: r[0] is the grid row nearest the cut
  // on the region side, r[j] the j-th row further in.
  int k;
  int step;
  double s;
  if (side == HalfPlane::below) {
    k = static_cast<int>(std::floor(pos + 1e-12));
    step = -1;
    s = pos - k;
  } else {
    k = static_cast<int>(std::ceil(pos - 1e-12));
    step = 1;
    s = k - pos;
  }
  s = std::clamp(s, 0.0, 1.0);
  auto row_at = [&](int j) -> double {
    const int i = k + step * j;
    return (i >= 0 && i < n) ? rows[i] : 0.0;
  };
  int count = side == HalfPlane::below ? k + 1 : n - k;
  if (count <= 0) return 0.0;
  if (count < 2 * kEndPoints) throw DomainError("halfplane_integrate: region too narrow");

  const auto& end = end_weights();
  std::vector<double> terms;
  terms.reserve(count + kEndPoints);
  for (int j = 0; j < count; ++j) terms.push_back((j < kEndPoints ? end[j] : 1.0) * row_at(j));
  const auto pw = partial_cell_weights(s);
  for (int j = 0; j < kEndPoints; ++j) terms.push_back(pw[j] * row_at(j));
  return pairwise_sum(terms) * dx;
}

double max_abs(const RealField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const ComplexField& f) {
  double m = 0.0;
  for (const cplx& v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double mean(const RealField& f) {
  return pairwise_sum(f.values()) / static_cast<double>(f.size());
}

double l2_norm(const RealField& f) {
  std::vector<double> sq(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) sq[k] = f[k] * f[k];
  const double dx = f.grid().dx();
  return std::sqrt(pairwise_sum(sq) * dx * dx);
}

}  // namespace csh
