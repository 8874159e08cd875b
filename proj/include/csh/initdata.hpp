#pragma once

#include <cstdint>
#include <string>

#include "csh/state.hpp"

namespace csh {

enum class Family { gaussian, ring, bump, random_bandlimited };
enum class Velocity { zero, i_phi, random };

struct InitialDataSpec {
  Family family = Family::gaussian;
  double amplitude = 1.0;
  double width = 1.0;  // sigma; support radius for bump
  double center1 = 0.0;
  double center2 = 0.0;
  int winding = 0;
  Velocity velocity = Velocity::zero;
  double ring_radius = 3.0;
  double k_cut = 3.0;  // random_bandlimited: physical wavenumber cutoff
  std::uint64_t seed = 1;

  // Radius (from the centre) beyond which the profile is below 1e-16 of its
  // peak, or exactly zero for bump.
  double profile_radius() const;
  // profile_radius plus the distance of the centre from the origin.
  double support_radius() const;
};

std::string to_string(Family f);
std::string to_string(Velocity v);
Family family_from_string(const std::string& s);
Velocity velocity_from_string(const std::string& s);

void validate(const InitialDataSpec& spec);

// Margin kept between the data support and the box edge.
inline constexpr double kSupportMargin = 2.0;

FieldState build_data(const InitialDataSpec& spec, const GridPtr& g, double p);

// Real band-limited periodic field with random Fourier coefficients for modes
// with |k| <= k_cut; deterministic in the seed.
RealField random_bandlimited_field(const GridPtr& g, std::uint64_t seed, double k_cut);

struct EnergyNorms {
  double e00 = 0.0;
  double e02 = 0.0;
  double e10 = 0.0;
};

// Gauge-invariant weighted norms of the data with covariant derivatives taken
// in the Coulomb representative of A.  k_max = 0 leaves e10 at zero.
EnergyNorms energy_norms(const FieldState& s, int k_max = 1, bool flat = false);

enum class Symmetry { constant_phase, rotate90, reflect_x1 };

FieldState transform(const FieldState& s, Symmetry op, double theta = 0.0);

}  // namespace csh
