#include "snowsim/beam_occlusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace snowsim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Interval {
  double lo, hi;
};

std::vector<BeamHit> finish_hits(std::vector<BeamHit> hits, double r0, double theta) {
  std::stable_sort(hits.begin(), hits.end(), [](const BeamHit& a, const BeamHit& b) {
    if (a.range != b.range) return a.range < b.range;
    return a.particle < b.particle;
  });
  BeamHit target;
  target.kind = HitKind::Target;
  target.range = r0;
  target.angle_lo = -0.5 * theta;
  target.angle_hi = 0.5 * theta;
  hits.push_back(target);
  occlusion_angles(hits, theta);
  return hits;
}

BeamHit particle_hit(const SnowParticle& p, std::int64_t index, double axis, double theta) {
  const auto sub = subtended_interval(p, axis);
  const double half = 0.5 * theta;
  BeamHit h;
  h.kind = HitKind::Particle;
  h.range = p.center_range();
  h.particle = index;
  if (sub.apex_inside) {
    h.angle_lo = -half;
    h.angle_hi = half;
  } else {
    h.angle_lo = std::max(-half, sub.center - sub.half_width);
    h.angle_hi = std::min(half, sub.center + sub.half_width);
  }
  return h;
}

}  // namespace

double angle_difference(double a, double b) noexcept {
  double d = std::remainder(a - b, kTwoPi);
  if (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

SubtendedInterval subtended_interval(const SnowParticle& p, double axis_bearing) noexcept {
  const double rc = p.center_range();
  const double r = p.radius_m();
  if (rc <= r) return {0.0, std::numbers::pi, true};
  return {angle_difference(std::atan2(p.cy, p.cx), axis_bearing), std::asin(r / rc), false};
}

bool in_beam(const SnowParticle& p, double axis_bearing, double r0, double theta) noexcept {
  const double rc = p.center_range();
  if (rc > r0) return false;
  const auto sub = subtended_interval(p, axis_bearing);
  if (sub.apex_inside) return true;
  return std::abs(sub.center) < 0.5 * theta + sub.half_width;
}

void occlusion_angles(std::span<BeamHit> hits, double theta) {
  // Claimed part of the beam, kept as sorted disjoint intervals.
  std::vector<Interval> claimed;
  double total = 0.0;
  for (auto& h : hits) {
    if (h.kind == HitKind::Target) continue;
    const double a = h.angle_lo, b = h.angle_hi;
    if (!(b > a)) {
      h.theta = 0.0;
      continue;
    }
    double covered = 0.0;
    for (const auto& c : claimed) {
      const double lo = std::max(a, c.lo), hi = std::min(b, c.hi);
      if (hi > lo) covered += hi - lo;
    }
    h.theta = std::max(0.0, (b - a) - covered);
    total += h.theta;

    // Merge [a, b] into the claimed set.
    Interval merged{a, b};
    std::vector<Interval> next;
    next.reserve(claimed.size() + 1);
    bool inserted = false;
    for (const auto& c : claimed) {
      if (c.hi < merged.lo) {
        next.push_back(c);
      } else if (c.lo > merged.hi) {
        if (!inserted) {
          next.push_back(merged);
          inserted = true;
        }
        next.push_back(c);
      } else {
        merged.lo = std::min(merged.lo, c.lo);
        merged.hi = std::max(merged.hi, c.hi);
      }
    }
    if (!inserted) next.push_back(merged);
    claimed = std::move(next);
  }
  const double theta0 = std::max(0.0, theta - total);
  for (auto& h : hits) {
    if (h.kind == HitKind::Target) h.theta = theta0;
  }
}

std::vector<BeamHit> particles_in_beam(const ParticleField& field, double x, double y, double r0,
                                       double theta) {
  const double axis = std::atan2(y, x);
  std::vector<BeamHit> hits;
  for (std::size_t k = 0; k < field.particles.size(); ++k) {
    const auto& p = field.particles[k];
    if (in_beam(p, axis, r0, theta)) hits.push_back(particle_hit(p, std::int64_t(k), axis, theta));
  }
  return finish_hits(std::move(hits), r0, theta);
}

BeamIndex::BeamIndex(const ParticleField& field, double bin_width) : field_(&field) {
  bin_count_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(kTwoPi / bin_width)));
  bin_width_ = kTwoPi / double(bin_count_);

  const auto& ps = field.particles;
  ranges_.resize(ps.size());
  std::vector<std::pair<double, std::uint32_t>> keyed(ps.size());
  for (std::size_t k = 0; k < ps.size(); ++k) {
    ranges_[k] = ps[k].center_range();
    keyed[k] = {ranges_[k], std::uint32_t(k)};
  }
  // Ascending range within every bin falls out of inserting in range order;
  // the index breaks ties so the order is total.
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::uint32_t> order(ps.size());
  for (std::size_t k = 0; k < ps.size(); ++k) order[k] = keyed[k].second;

  // Two passes over the same bin ranges: count, then fill.
  auto for_each_bin = [&](std::uint32_t k, auto&& fn) {
    const auto sub = subtended_interval(ps[k], 0.0);
    if (sub.apex_inside) return false;
    const double lo = sub.center - sub.half_width;
    const double hi = sub.center + sub.half_width;
    const auto first = static_cast<std::int64_t>(std::floor((lo + std::numbers::pi) / bin_width_));
    const auto last = static_cast<std::int64_t>(std::floor((hi + std::numbers::pi) / bin_width_));
    const auto n = std::int64_t(bin_count_);
    const std::int64_t span = std::min<std::int64_t>(last - first, n - 1);
    for (std::int64_t b = first; b <= first + span; ++b) fn(std::size_t(((b % n) + n) % n));
    return true;
  };

  std::vector<std::uint32_t> counts(bin_count_ + 1, 0);
  for (auto k : order) {
    if (!for_each_bin(k, [&](std::size_t b) { ++counts[b + 1]; })) apex_.push_back(k);
  }
  bin_start_.assign(bin_count_ + 1, 0);
  for (std::size_t b = 0; b < bin_count_; ++b) bin_start_[b + 1] = bin_start_[b] + counts[b + 1];
  entries_.resize(bin_start_.back());
  std::vector<std::uint32_t> fill(bin_start_.begin(), bin_start_.end() - 1);
  for (auto k : order) {
    for_each_bin(k, [&](std::size_t b) { entries_[fill[b]++] = k; });
  }
}

std::vector<BeamHit> BeamIndex::query(double x, double y, double r0, double theta) const {
  const double axis = std::atan2(y, x);
  const auto& ps = field_->particles;

  std::vector<std::uint32_t> candidates(apex_.begin(), apex_.end());
  const double half = 0.5 * theta;
  const auto first = static_cast<std::int64_t>(std::floor((axis - half + std::numbers::pi) / bin_width_));
  const auto last = static_cast<std::int64_t>(std::floor((axis + half + std::numbers::pi) / bin_width_));
  const auto n = std::int64_t(bin_count_);
  const std::int64_t span = std::min<std::int64_t>(last - first, n - 1);
  for (std::int64_t b = first; b <= first + span; ++b) {
    const auto bin = std::size_t(((b % n) + n) % n);
    for (std::uint32_t e = bin_start_[bin]; e < bin_start_[bin + 1]; ++e) {
      const auto k = entries_[e];
      if (ranges_[k] > r0) break;
      candidates.push_back(k);
    }
  }
  if (span > 0) {
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  }

  std::vector<BeamHit> hits;
  for (auto k : candidates) {
    if (in_beam(ps[k], axis, r0, theta)) hits.push_back(particle_hit(ps[k], std::int64_t(k), axis, theta));
  }
  return finish_hits(std::move(hits), r0, theta);
}

}  // namespace snowsim
