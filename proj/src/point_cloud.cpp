#include "snowsim/point_cloud.hpp"

#include <algorithm>
#include <bit>

namespace snowsim {

std::vector<std::size_t> PointCloud::select_layer(std::uint32_t layer) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (points[k].layer == layer) out.push_back(k);
  }
  return out;
}

bool PointCloud::has_layers() const noexcept {
  return std::all_of(points.begin(), points.end(),
                     [](const LidarPoint& p) { return p.layer.has_value(); });
}

bool same_payload(const LidarPoint& a, const LidarPoint& b) noexcept {
  return std::bit_cast<std::uint32_t>(a.x) == std::bit_cast<std::uint32_t>(b.x) &&
         std::bit_cast<std::uint32_t>(a.y) == std::bit_cast<std::uint32_t>(b.y) &&
         std::bit_cast<std::uint32_t>(a.z) == std::bit_cast<std::uint32_t>(b.z) &&
         std::bit_cast<std::uint32_t>(a.intensity) == std::bit_cast<std::uint32_t>(b.intensity);
}

bool same_payload(const PointCloud& a, const PointCloud& b) noexcept {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!same_payload(a.points[k], b.points[k])) return false;
  }
  return true;
}

}  // namespace snowsim
