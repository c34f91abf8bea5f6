#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "snowsim/point_cloud.hpp"

namespace snowsim {

/// Speed of light in vacuum, m/s.
inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Factory intensity-calibration constants of one laser.
struct LaserCalibration {
  double focal_slope = 0.0;     // f_s, intensity units
  double focal_distance = 0.0;  // f_d, dimensionless
  double max_intensity = 255.0; // i_max
  double elevation = 0.0;       // radians

  /// Focal offset f_o = ((1 - f_d) / 13100)^2.
  double focal_offset() const noexcept {
    const double t = (1.0 - focal_distance) / 13100.0;
    return t * t;
  }
};

struct CalibrationGlobals {
  double pulse_half_power_width = 10e-9;  // tau_H, s
  double max_range = 120.0;               // R_max, m
  double beam_divergence = 0.003;         // Theta, rad
  double overlap_start = 0.5;             // R_1, m
  double overlap_full = 2.0;              // R_2, m
};

/// Sensor-wide constants plus one LaserCalibration per layer, ordered by
/// ascending elevation (layer index == position in `lasers`).
class SensorCalibration {
 public:
  using Globals = CalibrationGlobals;

  /// Validates every invariant; throws ConfigError on violation.
  SensorCalibration(Globals globals, std::vector<LaserCalibration> lasers);

  const Globals& globals() const noexcept { return globals_; }
  std::span<const LaserCalibration> lasers() const noexcept { return lasers_; }
  const LaserCalibration& laser(std::uint32_t layer) const;
  std::uint32_t layer_count() const noexcept { return static_cast<std::uint32_t>(lasers_.size()); }

  double tau_h() const noexcept { return globals_.pulse_half_power_width; }
  double max_range() const noexcept { return globals_.max_range; }
  double theta() const noexcept { return globals_.beam_divergence; }
  double r1() const noexcept { return globals_.overlap_start; }
  double r2() const noexcept { return globals_.overlap_full; }
  /// Spatial echo width c * tau_H.
  double pulse_length() const noexcept { return kSpeedOfLight * globals_.pulse_half_power_width; }

  std::vector<double> elevation_angles() const;

  /// Uniformly spaced elevations between `lowest` and `highest` (radians),
  /// zero focal correction and the given i_max for every laser.
  static SensorCalibration uniform(std::uint32_t n_lasers, double lowest, double highest,
                                   double max_intensity = 255.0, Globals globals = {});

 private:
  Globals globals_;
  std::vector<LaserCalibration> lasers_;
};

/// Text calibration format, version 1:
///
///   snowsim-calibration 1
///   # comment
///   tau_h = 1e-8
///   r_max = 120
///   theta = 0.003
///   r1 = 0.5
///   r2 = 2.0
///   lasers = 2          (optional; must match the number of blocks)
///
///   laser 0
///   elevation = -0.43
///   focal_slope = 1.3
///   focal_distance = 1200
///   max_intensity = 255
///
///   laser 1
///   ...
///
/// Globals may be omitted and take the defaults of SensorCalibration::Globals.
/// Laser blocks must appear in index order 0..n-1.
SensorCalibration parse_calibration(std::istream& in);
SensorCalibration read_calibration(const std::filesystem::path& path);
void write_calibration(std::ostream& out, const SensorCalibration& calib);
void write_calibration(const std::filesystem::path& path, const SensorCalibration& calib);

/// Index of the elevation angle nearest to `elevation`; ties go to the lower
/// index. `angles` must be sorted ascending and non-empty.
std::uint32_t nearest_layer(double elevation, std::span<const double> angles) noexcept;

/// Sets each point's layer from its elevation angle. Existing layer ids below
/// the laser count are kept, so the operation is idempotent.
PointCloud assign_layers(PointCloud pc, const SensorCalibration& calib);

}  // namespace snowsim
