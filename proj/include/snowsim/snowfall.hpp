#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "snowsim/augmentation.hpp"
#include "snowsim/beam_occlusion.hpp"
#include "snowsim/echo_model.hpp"
#include "snowsim/sensor_calibration.hpp"
#include "snowsim/snow_sampling.hpp"

namespace snowsim {

struct SnowfallConfig {
  double rate = 0.0;  // snowfall rate, mm/h
  double snow_reflectivity = 0.9;
  /// Target reflectivity used both to recover C_A * P0 from the measured
  /// intensity and to evaluate the target echo. It cancels for the target
  /// but fixes the particle-to-target amplitude ratio: particle echoes scale
  /// with rho_s^2 * i_max / rho_0. This is the main free parameter.
  double target_reflectivity = 1e-6 / std::numbers::pi;
  std::uint64_t seed = 0;
  /// Peak-search grid step in meters; 0 selects c * tau_H / 100.
  double grid_step = 0.0;
  /// Bearing bin width of the beam index; 0 selects the beam divergence.
  double bin_width = 0.0;
  SnowParameters snow;
  /// Worker threads over layers; results do not depend on it.
  unsigned threads = 1;
};

/// Validates the configuration; throws ConfigError.
void validate(const SnowfallConfig& cfg);

/// Everything computed for one beam.
struct BeamTrace {
  std::vector<BeamHit> hits;
  EchoProfile profile;  // empty when the beam is undisturbed
  EchoPeak peak;
  LidarPoint output;
  PointLabel label = PointLabel::Unchanged;
  bool power_clamped = false;
  bool no_echo = false;
};

/// Echo terms of every hit of one beam: the target echo is scaled from the
/// raw power `target_power` measured at `r0`, particle echoes from
/// rho_s * i_max.
EchoProfile echo_profile(std::span<const BeamHit> hits, double target_power, double r0,
                         const LaserCalibration& laser, const SensorCalibration& calib,
                         const SnowfallConfig& cfg);

/// Peak-search step for `calib` under `cfg`.
double peak_grid_step(const SensorCalibration& calib, const SnowfallConfig& cfg) noexcept;

/// Runs the echo simulation for one point against the particle field of its
/// layer. Points with no particle in the beam are returned bit-identical.
BeamTrace trace_beam(const LidarPoint& point, const BeamIndex& index, const LaserCalibration& laser,
                     const SensorCalibration& calib, const SnowfallConfig& cfg);

/// Seed of the particle field of `layer` for a frame seeded with `frame_seed`.
std::uint64_t layer_seed(std::uint64_t frame_seed, std::uint32_t layer) noexcept;

/// Snowfall augmentation of one sweep. Samples one particle field per layer
/// that contains points, then traces every point. Points without a layer id
/// are assigned from their elevation. Throws ConfigError if a point's layer
/// is missing from the calibration.
AugmentationResult augment_snow(const PointCloud& pc, const SensorCalibration& calib,
                                const SnowfallConfig& cfg);

/// Same, with caller-provided particle fields; `field_for(layer)` must return
/// a field that outlives the call.
using FieldProvider = std::function<const ParticleField&(std::uint32_t layer)>;
AugmentationResult augment_snow(const PointCloud& pc, const SensorCalibration& calib,
                                const SnowfallConfig& cfg, const FieldProvider& field_for);

}  // namespace snowsim
