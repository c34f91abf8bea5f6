#pragma once

#include <cstddef>
#include <vector>

#include "snowsim/point_cloud.hpp"

namespace snowsim {

/// Dynamic-radius outlier removal parameters. A point at planar range r is
/// kept iff it has at least `min_neighbors` other points within
/// max(min_radius, radius_multiplier * r * angular_resolution).
struct DrorConfig {
  double angular_resolution = 0.00349;  // rad, horizontal resolution (alpha)
  double radius_multiplier = 3.0;       // beta
  std::size_t min_neighbors = 3;        // k_min
  double min_radius = 0.04;             // m
  double grid_cell = 0.25;              // m, neighbor-search hash cell
};

void validate(const DrorConfig& cfg);

double search_radius(const LidarPoint& p, const DrorConfig& cfg) noexcept;

struct DrorResult {
  PointCloud kept;
  PointCloud removed;
  std::vector<bool> removed_mask;  // per input point
};

DrorResult dror_filter(const PointCloud& pc, const DrorConfig& cfg = {});

/// Axis-aligned box in the sensor frame (forward = +x).
struct DetectionBox {
  double x_min = 0.0, x_max = 10.0;
  double y_min = -1.0, y_max = 1.0;
  double z_min = -1.0, z_max = 1.0;

  bool contains(const LidarPoint& p) const noexcept {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max && p.z >= z_min &&
           p.z <= z_max;
  }
};

enum class SnowfallClass { Clear, Light, Heavy };

const char* to_string(SnowfallClass c) noexcept;

struct SnowfallClassification {
  SnowfallClass level = SnowfallClass::Clear;
  std::size_t removed_in_box = 0;
};

/// Light snowfall removes 10-79 points from the box, heavy at least 80.
SnowfallClass classify_count(std::size_t removed_in_box) noexcept;

SnowfallClassification classify_snowfall(const PointCloud& pc, const DrorConfig& cfg = {},
                                         const DetectionBox& box = {});

}  // namespace snowsim
