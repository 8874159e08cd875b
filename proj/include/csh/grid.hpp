#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace csh {

using cplx = std::complex<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteError : Error {
  using Error::Error;
};

struct NonSolvableSourceError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

// Periodic n x n grid on [-L/2, L/2)^2.  Storage index is i1*n + i2, so the
// x2 direction is contiguous.  Owns the FFTW plans for its size.
class Grid2D {
 public:
  Grid2D(int n, double L);
  ~Grid2D();
  Grid2D(const Grid2D&) = delete;
  Grid2D& operator=(const Grid2D&) = delete;

  int n() const noexcept { return n_; }
  double L() const noexcept { return L_; }
  double dx() const noexcept { return dx_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
  double coord(int i) const noexcept { return -0.5 * L_ + i * dx_; }
  std::size_t index(int i1, int i2) const noexcept {
    return static_cast<std::size_t>(i1) * n_ + i2;
  }

  // Signed mode number for storage slot m in [0, n).
  int mode(int m) const noexcept { return m <= n_ / 2 ? m : m - n_; }
  double wavenumber(int m) const noexcept;
  bool nyquist(int m) const noexcept { return m == n_ / 2; }
  // Highest retained |mode| under the 2/3 rule.
  int dealias_cutoff() const noexcept { return n_ / 3; }

  bool same_shape(const Grid2D& o) const noexcept { return n_ == o.n_ && L_ == o.L_; }

  // 2D transforms, in place.  forward is unnormalized, backward divides by n^2.
  void forward(cplx* data) const;
  void backward(cplx* data) const;

 private:
  int n_;
  double L_;
  double dx_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

using GridPtr = std::shared_ptr<const Grid2D>;

GridPtr make_grid(int n, double L);

template <class T>
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr g, T fill = T{}) : grid_(std::move(g)), v_(grid_->size(), fill) {}

  const Grid2D& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  bool empty() const noexcept { return !grid_; }
  std::size_t size() const noexcept { return v_.size(); }

  T& operator()(int i1, int i2) { return v_[grid_->index(i1, i2)]; }
  const T& operator()(int i1, int i2) const { return v_[grid_->index(i1, i2)]; }
  T& operator[](std::size_t k) { return v_[k]; }
  const T& operator[](std::size_t k) const { return v_[k]; }
  T* data() noexcept { return v_.data(); }
  const T* data() const noexcept { return v_.data(); }
  std::span<T> values() noexcept { return v_; }
  std::span<const T> values() const noexcept { return v_; }

 private:
  GridPtr grid_;
  std::vector<T> v_;
};

using RealField = Field<double>;
using ComplexField = Field<cplx>;

enum class Axis { x1 = 1, x2 = 2 };

enum class HalfPlane { below, above };  // x1 <= c, x1 >= c

template <class T, class F>
Field<T> sample(const GridPtr& g, F&& f) {
  Field<T> out(g);
  const int n = g->n();
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2) out(i1, i2) = f(g->coord(i1), g->coord(i2));
  return out;
}

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* what);
void require_finite(const RealField& f, const char* what);
void require_finite(const ComplexField& f, const char* what);

// Spectrum helpers.  A spectrum is a ComplexField holding unnormalized DFT
// coefficients in standard layout.
ComplexField to_spectrum(const RealField& f);
ComplexField to_spectrum(const ComplexField& f);
ComplexField from_spectrum_complex(ComplexField s);
RealField from_spectrum_real(ComplexField s);

// In-place spectral multipliers.
void apply_derivative(ComplexField& s, Axis axis);
void apply_laplacian(ComplexField& s);
// Multiplies by -1/|k|^2 and zeroes the mean mode.  Throws
// NonSolvableSourceError when the mean mode exceeds meanTol.
void apply_inverse_laplacian(ComplexField& s);
void apply_dealias(ComplexField& s);

RealField spectral_derivative(const RealField& f, Axis axis);
ComplexField spectral_derivative(const ComplexField& f, Axis axis);
RealField laplacian(const RealField& f);
ComplexField laplacian(const ComplexField& f);
RealField inverse_laplacian_zero_mean(const RealField& f);
RealField dealias(const RealField& f);
ComplexField dealias(const ComplexField& f);

// Trigonometric cardinal weights w_i(x) such that f(x) = sum_i w_i f(x_i) for
// band-limited periodic f (Nyquist handled as a cosine).
std::vector<double> cardinal_weights(const Grid2D& g, double x);

std::vector<double> interpolate_column(const RealField& f, double x1);
std::vector<cplx> interpolate_column(const ComplexField& f, double x1);

// Point value by separable trigonometric interpolation.
double evaluate_at(const RealField& f, double x1, double x2);
cplx evaluate_at(const ComplexField& f, double x1, double x2);

double pairwise_sum(std::span<const double> v);
double integrate(const RealField& f);
// Line integral over x2 of a column sampled on the grid.
double integrate_line(const Grid2D& g, std::span<const double> column);
// Integral over {x1 <= c} or {x1 >= c}.  Uses only samples on the region side
// of the cut: eighth-order end corrections plus a degree-7 partial cell.
double halfplane_integrate(const RealField& f, double c, HalfPlane side);

double max_abs(const RealField& f);
double max_abs(const ComplexField& f);
double mean(const RealField& f);
double l2_norm(const RealField& f);

}  // namespace csh
