#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace snowsim {

/// One LiDAR return in the sensor frame.
struct LidarPoint {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;
  float intensity = 0.0f;
  /// Laser index; empty until assigned from elevation or read from file.
  std::optional<std::uint32_t> layer;

  double range() const noexcept {
    return std::sqrt(double(x) * x + double(y) * y + double(z) * z);
  }
  double planar_range() const noexcept { return std::sqrt(double(x) * x + double(y) * y); }
  double elevation() const noexcept { return std::atan2(double(z), planar_range()); }

  friend bool operator==(const LidarPoint&, const LidarPoint&) = default;
};

struct PointCloud {
  std::vector<LidarPoint> points;
  std::string frame_id;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }

  /// Indices of points with layer == `layer`, in cloud order.
  std::vector<std::size_t> select_layer(std::uint32_t layer) const;

  /// True if every point carries a layer id.
  bool has_layers() const noexcept;
};

/// Bitwise equality of coordinates and intensity; layer ids are ignored.
bool same_payload(const LidarPoint& a, const LidarPoint& b) noexcept;
/// Same point count and bitwise-equal payload point by point.
bool same_payload(const PointCloud& a, const PointCloud& b) noexcept;

}  // namespace snowsim
