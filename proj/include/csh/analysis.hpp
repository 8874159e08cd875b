#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "csh/grid.hpp"

namespace csh {

enum class RateModel { pure_power, power_with_sqrt_log };
std::string to_string(RateModel m);
RateModel rate_model_from_string(const std::string& s);

struct RateFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double t_min = 0.0, t_max = 0.0;
  int samples = 0;
  RateModel model = RateModel::pure_power;
};

// Least squares of log y (minus 1/2 log log(2+t) for the sqrt-log model)
// against log(1+t) over t_min <= t <= t_max.  Needs 8 samples and y > 0.
RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& y, double t_min, double t_max,
                 RateModel model = RateModel::pure_power);

struct BoundConstant {
  double value = 0.0;   // sup of w(t) y / normalizer
  double t_arg = 0.0;   // where the sup is attained
  int samples = 0;
};

BoundConstant bound_constant(const std::vector<double>& t, const std::vector<double>& y,
                             const std::function<double(double)>& w, double normalizer,
                             double t_min = -1e300, double t_max = 1e300);

// The same constant over an early and a late window.
struct WindowBound {
  BoundConstant early, late;
  double growth = 0.0;  // late/early - 1
  bool finite = false;
};
WindowBound window_bound(const std::vector<double>& t, const std::vector<double>& y,
                         const std::function<double(double)>& w, double normalizer, double t0, double t1,
                         double t2);

inline constexpr double kLogSobolevConstant = 0.82699334313268;  // 3 sqrt(3) / (2 pi)

struct LogSobolevResult {
  double lhs = 0.0;            // max |u|^2 over the grid
  double rhs = 0.0;            // c |grad u|^2 ln(|u|_{H^2} / |grad u|)
  double grad_sq = 0.0;        // |grad u|_2^2
  double h2 = 0.0;             // |u|_{H^2}
  bool gated = false;          // |u|_{H^2} >= e |grad u|_2
  bool pass = false;           // lhs <= rhs (1 + 1e-8)
};

// Spectral quadrature on the torus.  Throws DomainError on a zero gradient.
LogSobolevResult log_sobolev_check(const RealField& u);

struct LogSobolevSuite {
  int fields = 0;
  int passed = 0;
  int failed = 0;    // gated fields that failed: a bug
  int skipped = 0;   // fields below the gate, not counted
  int ungated_failures = 0;
  double worst_ratio = 0.0;  // max lhs/rhs over gated fields
};
LogSobolevSuite log_sobolev_suite(const GridPtr& g, int count, std::uint64_t seed, double k_cut);

}  // namespace csh
