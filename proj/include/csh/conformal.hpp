#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "csh/gauge.hpp"

namespace csh {

class RunArchive;

// Source point (t, x) of the region {(t*)^2 - |x|^2 >= t*}, t* = t + 2, and
// its image (tt, xt) in the cone {tt + |xt| < 1, tt >= 0}.
struct ConformalPoint {
  double t = 0.0, x1 = 0.0, x2 = 0.0;
  double tt = 0.0, xt1 = 0.0, xt2 = 0.0;
  double lambda = 0.0;  // (t*)^2 - |x|^2 = ((1 - tt)^2 - |xt|^2)^{-1}
};

bool in_source_domain(double t, double x1, double x2);
bool in_image_cone(double tt, double xt1, double xt2);

// Both throw DomainError outside their domains.
ConformalPoint forward_map(double t, double x1, double x2);
ConformalPoint inverse_map(double tt, double xt1, double xt2);

// J[nu][alpha] = d x^nu / d xt^alpha with x^0 = t and xt^0 = tt.
using Jacobian3 = std::array<std::array<double, 3>, 3>;
Jacobian3 inverse_jacobian(double tt, double xt1, double xt2);

struct ImagePoint {
  double tt = 0.0, xt1 = 0.0, xt2 = 0.0;
};

// Stored snapshots of a run with trigonometric interpolation in space and
// Lagrange interpolation in time.  Every stride-th snapshot is used.
class SnapshotSeries {
 public:
  explicit SnapshotSeries(const RunArchive& run, int stride = 1, int order = 6);

  double t_min() const { return times_.front(); }
  double t_max() const { return times_.back(); }
  bool flat() const { return flat_; }
  bool nonlinear() const { return nonlinear_; }
  double p() const { return p_; }
  double half_box() const;
  double spacing() const;

  struct Value {
    cplx phi;
    std::array<double, 3> A{};  // lower components A_0, A_1, A_2
  };
  // Throws DomainError when t lies outside the stored range.
  Value at(double t, double x1, double x2) const;

 private:
  std::vector<double> times_;
  std::vector<ComplexField> phi_;
  std::vector<GaugePotential> A_;
  GridPtr grid_;
  bool flat_ = false;
  bool nonlinear_ = true;
  double p_ = 3.0;
  int order_ = 6;
};

// Lambda^{1/2} phi at the preimages.
std::vector<cplx> transformed_field(const SnapshotSeries& series, const std::vector<ImagePoint>& pts);

struct ResidualOptions {
  double h = 0.01;        // image-space stencil step
  double margin = 0.05;   // distance kept from the cone boundary
};

struct ResidualStats {
  int samples = 0;
  double max = 0.0;
  double median = 0.0;
  double scale = 0.0;             // max |Lambda^{(5-p)/2} |phi~|^{p-1} phi~| over the samples
  std::vector<double> residuals;  // |box phi~ - rhs| / scale, per sample
};

// Fourth-order central differences over a 13-point stencil in image
// coordinates.  Throws DomainError if a stencil point leaves the cone minus
// the margin or its preimage lies outside the stored times or the box.
ResidualStats transformed_equation_residual(const SnapshotSeries& series, const std::vector<ImagePoint>& pts,
                                            const ResidualOptions& opt = {});

// Seeded points whose full stencil (step h_max) is admissible for the series.
std::vector<ImagePoint> sample_image_cone(const SnapshotSeries& series, double L, int count, std::uint64_t seed,
                                          double h_max, double margin = 0.05);

struct RefinementStudy {
  std::vector<int> strides;
  std::vector<double> h, median, max;
  double order = 0.0;  // from the two finest levels, using medians
};
// Snapshot stride and stencil step refined together: h = h0 * stride.
RefinementStudy residual_refinement(const RunArchive& run, int count, std::uint64_t seed, double h0,
                                    const std::vector<int>& strides = {4, 2, 1}, double margin = 0.05);

// max |phi~| (1 - tt)^{(5 - p + eps)/(p + 1)} over the points.
double normalized_image_bound(const SnapshotSeries& series, const std::vector<ImagePoint>& pts, double eps);

}  // namespace csh
