#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <vector>

namespace snowsim {

/// A snow flake in the 2D plane of one scan layer, sensor at the origin.
struct SnowParticle {
  double cx = 0.0;        // m
  double cy = 0.0;        // m
  double diameter = 0.0;  // mm

  double radius_m() const noexcept { return diameter * 0.5e-3; }
  double center_range() const noexcept;
};

/// Exponential size distribution N(D) = n0 * exp(-lambda * D).
struct SizeDistribution {
  double n0 = 0.0;      // m^-3 mm^-1
  double lambda = std::numeric_limits<double>::infinity();  // mm^-1

  bool empty() const noexcept { return n0 == 0.0; }
  double density(double diameter_mm) const noexcept;
  /// Integral of N(D) over [lo, hi] mm, in m^-3.
  double number_density(double lo_mm, double hi_mm) const noexcept;
  /// Mean diameter of the distribution truncated to [lo, hi] mm.
  double mean_diameter(double lo_mm, double hi_mm) const noexcept;
};

/// Power-law dependence of the size distribution on snowfall rate and the
/// sampling constraints. Defaults are the Gunn-Marshall fit
/// N0 = 3800 r^-0.87 m^-3 mm^-1, Lambda = 2.55 r^-0.48 mm^-1.
struct SnowParameters {
  double n0_coefficient = 3800.0;
  double n0_exponent = -0.87;
  double lambda_coefficient = 2.55;
  double lambda_exponent = -0.48;
  double min_diameter = 0.1;   // mm
  double max_diameter = 10.0;  // mm
  /// Multiplies the areal particle density of the sampling plane.
  double density_scale = 1.0;
  int max_attempts = 1000;
};

/// Throws DomainError for a negative rate. A zero rate yields an empty
/// distribution.
SizeDistribution size_distribution(double rate_mm_h, const SnowParameters& params = {});

/// Particles per square meter of the layer plane: the truncated number
/// density times the truncated mean diameter (the plane is treated as a slab
/// one mean diameter thick), times density_scale.
double slab_density(double rate_mm_h, const SnowParameters& params = {});

/// Number of particles sampled on a disc of radius `max_range`.
std::size_t expected_particle_count(double max_range, double rate_mm_h,
                                    const SnowParameters& params = {});

struct ParticleField {
  std::vector<SnowParticle> particles;
  double rate = 0.0;       // mm/h
  double max_range = 0.0;  // m
  std::uint64_t seed = 0;
};

/// Samples a field on the disc of radius `max_range`. Diameters are i.i.d.
/// from the truncated size distribution; centers are uniform on the disc and
/// rejected while they intersect an already placed particle. Deterministic in
/// (max_range, rate, seed, params). Throws DomainError for a rate outside
/// [0, 10] mm/h and SamplingError if a particle cannot be placed.
ParticleField sample_field(double max_range, double rate_mm_h, std::uint64_t seed,
                           const SnowParameters& params = {});

/// Debug dump: header "cx,cy,D" then one row per particle.
void write_field_csv(std::ostream& out, const ParticleField& field);

}  // namespace snowsim
