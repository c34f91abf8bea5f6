#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "snowsim/snow_sampling.hpp"

namespace snowsim {

enum class HitKind : std::uint8_t { Target, Particle };

/// One reflector inside a beam wedge.
struct BeamHit {
  HitKind kind = HitKind::Target;
  double range = 0.0;  // m; particle center range, or R0 for the target
  double theta = 0.0;  // rad; visible angular extent after occlusion
  /// Subtended angular interval relative to the beam axis, clipped to
  /// [-Theta/2, Theta/2]. Spans the whole beam for the target.
  double angle_lo = 0.0;
  double angle_hi = 0.0;
  std::int64_t particle = -1;  // index into the field; -1 for the target
};

/// Signed angle a - b wrapped to (-pi, pi].
double angle_difference(double a, double b) noexcept;

/// Angular interval of `p` seen from the origin, relative to `axis_bearing`.
/// `apex_inside` is set when the disc covers the origin.
struct SubtendedInterval {
  double center = 0.0;
  double half_width = 0.0;
  bool apex_inside = false;
};
SubtendedInterval subtended_interval(const SnowParticle& p, double axis_bearing) noexcept;

/// True when particle `p` lies in the wedge with apex at the origin, axis
/// bearing `axis_bearing`, full opening `theta`, truncated at `r0` (the
/// particle center must not lie beyond the target).
bool in_beam(const SnowParticle& p, double axis_bearing, double r0, double theta) noexcept;

/// Assigns visible angles front to back. `hits` must be sorted by ascending
/// range with the target last among equal ranges. Each particle keeps the
/// part of its interval not already claimed by nearer particles; the target
/// receives theta_0 = Theta - sum(theta_j).
void occlusion_angles(std::span<BeamHit> hits, double theta);

/// Reference implementation: tests every particle of `field` against the
/// beam toward (x, y), then assigns occlusion angles. Result is sorted by
/// range and always ends with exactly one target hit at range r0.
std::vector<BeamHit> particles_in_beam(const ParticleField& field, double x, double y, double r0,
                                       double theta);

/// Bearing-binned index over a particle field for fast beam queries. Returns
/// exactly what particles_in_beam returns on the same field.
class BeamIndex {
 public:
  /// `bin_width` is an upper bound; the actual width divides 2*pi evenly.
  BeamIndex(const ParticleField& field, double bin_width);

  std::vector<BeamHit> query(double x, double y, double r0, double theta) const;

  const ParticleField& field() const noexcept { return *field_; }

 private:
  const ParticleField* field_;
  double bin_width_;
  std::size_t bin_count_;
  std::vector<std::uint32_t> bin_start_;  // CSR offsets, bin_count_ + 1
  std::vector<std::uint32_t> entries_;    // particle ids, ascending range per bin
  std::vector<double> ranges_;            // center range per particle
  std::vector<std::uint32_t> apex_;       // particles covering the origin
};

}  // namespace snowsim
