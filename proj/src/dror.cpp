#include "snowsim/dror.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "snowsim/errors.hpp"

namespace snowsim {

void validate(const DrorConfig& cfg) {
  if (!(cfg.angular_resolution > 0.0 && cfg.radius_multiplier > 0.0 && cfg.min_neighbors > 0 &&
        cfg.min_radius > 0.0 && cfg.grid_cell > 0.0)) {
    throw ConfigError("DROR parameters must all be > 0");
  }
}

double search_radius(const LidarPoint& p, const DrorConfig& cfg) noexcept {
  return std::max(cfg.min_radius, cfg.radius_multiplier * p.planar_range() * cfg.angular_resolution);
}

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = std::uint64_t(k.x) * 0x9E3779B185EBCA87ULL;
    h ^= std::uint64_t(k.y) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
    h ^= std::uint64_t(k.z) * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2);
    return std::size_t(h);
  }
};

}  // namespace

DrorResult dror_filter(const PointCloud& pc, const DrorConfig& cfg) {
  validate(cfg);
  const double cell = cfg.grid_cell;
  auto key_of = [cell](double x, double y, double z) {
    return CellKey{static_cast<std::int64_t>(std::floor(x / cell)),
                   static_cast<std::int64_t>(std::floor(y / cell)),
                   static_cast<std::int64_t>(std::floor(z / cell))};
  };

  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellHash> grid;
  grid.reserve(pc.size());
  for (std::size_t k = 0; k < pc.size(); ++k) {
    const auto& p = pc.points[k];
    grid[key_of(p.x, p.y, p.z)].push_back(std::uint32_t(k));
  }

  DrorResult out;
  out.kept.frame_id = pc.frame_id;
  out.removed.frame_id = pc.frame_id;
  out.removed_mask.assign(pc.size(), false);

  for (std::size_t k = 0; k < pc.size(); ++k) {
    const auto& p = pc.points[k];
    const double sr = search_radius(p, cfg);
    const double sr2 = sr * sr;
    const auto lo = key_of(p.x - sr, p.y - sr, p.z - sr);
    const auto hi = key_of(p.x + sr, p.y + sr, p.z + sr);
    std::size_t found = 0;
    for (auto cx = lo.x; cx <= hi.x && found < cfg.min_neighbors; ++cx) {
      for (auto cy = lo.y; cy <= hi.y && found < cfg.min_neighbors; ++cy) {
        for (auto cz = lo.z; cz <= hi.z && found < cfg.min_neighbors; ++cz) {
          const auto it = grid.find({cx, cy, cz});
          if (it == grid.end()) continue;
          for (const auto j : it->second) {
            if (j == k) continue;
            const auto& q = pc.points[j];
            const double dx = double(q.x) - p.x, dy = double(q.y) - p.y, dz = double(q.z) - p.z;
            if (dx * dx + dy * dy + dz * dz <= sr2 && ++found >= cfg.min_neighbors) break;
          }
        }
      }
    }
    if (found >= cfg.min_neighbors) {
      out.kept.points.push_back(p);
    } else {
      out.removed.points.push_back(p);
      out.removed_mask[k] = true;
    }
  }
  return out;
}

const char* to_string(SnowfallClass c) noexcept {
  switch (c) {
    case SnowfallClass::Clear: return "clear";
    case SnowfallClass::Light: return "light";
    case SnowfallClass::Heavy: return "heavy";
  }
  return "?";
}

SnowfallClass classify_count(std::size_t n) noexcept {
  if (n >= 80) return SnowfallClass::Heavy;
  if (n >= 10) return SnowfallClass::Light;
  return SnowfallClass::Clear;
}

SnowfallClassification classify_snowfall(const PointCloud& pc, const DrorConfig& cfg,
                                         const DetectionBox& box) {
  const auto filtered = dror_filter(pc, cfg);
  std::size_t count = 0;
  for (const auto& p : filtered.removed.points) count += box.contains(p);
  return {classify_count(count), count};
}

}  // namespace snowsim
