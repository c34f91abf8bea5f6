#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "snowsim/point_cloud.hpp"

namespace snowsim {

/// Fate of one input point under an augmentation.
enum class PointLabel : std::uint8_t {
  Unchanged,
  Attenuated,  // kept at its range with lower intensity
  Scattered,   // replaced by a return from a snow particle
  Dropped      // removed (wet ground below the noise floor)
};

const char* to_string(PointLabel label) noexcept;

struct AugmentationStats {
  std::size_t unchanged = 0;
  std::size_t attenuated = 0;
  std::size_t scattered = 0;
  std::size_t dropped = 0;
  /// Points whose inverted power was negative and clamped to zero.
  std::size_t power_clamped = 0;
  /// Wet ground: recovered reflectivities outside [0, 0.999].
  std::size_t reflectivity_clamped = 0;
  /// Snow: beams whose superposed echo had no positive power.
  std::size_t no_echo = 0;
  /// Snow: particles sampled per layer (index = layer).
  std::vector<std::size_t> particles_per_layer;

  std::size_t total() const noexcept { return unchanged + attenuated + scattered + dropped; }
  void count(PointLabel label) noexcept;
};

struct AugmentationResult {
  PointCloud cloud;                // output points (dropped points removed)
  std::vector<PointLabel> labels;  // one per input point, input order
  AugmentationStats stats;
};

}  // namespace snowsim
