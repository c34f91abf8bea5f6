#include "snowsim/snow_sampling.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "snowsim/errors.hpp"
#include "snowsim/random.hpp"

namespace snowsim {

double SnowParticle::center_range() const noexcept { return std::hypot(cx, cy); }

double SizeDistribution::density(double d) const noexcept {
  if (empty()) return 0.0;
  return n0 * std::exp(-lambda * d);
}

double SizeDistribution::number_density(double lo, double hi) const noexcept {
  if (empty() || !(hi > lo)) return 0.0;
  // n0/lambda * (e^{-lambda lo} - e^{-lambda hi})
  return n0 / lambda * std::exp(-lambda * lo) * -std::expm1(-lambda * (hi - lo));
}

double SizeDistribution::mean_diameter(double lo, double hi) const noexcept {
  if (empty() || !(hi > lo)) return 0.0;
  const double span = hi - lo;
  const double x = lambda * span;
  // Mean of an exponential truncated to [0, span], shifted by lo.
  return lo + 1.0 / lambda - span / std::expm1(x);
}

SizeDistribution size_distribution(double rate, const SnowParameters& p) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw DomainError("snowfall rate must be a finite value >= 0 mm/h");
  }
  if (rate == 0.0) return {};
  return {p.n0_coefficient * std::pow(rate, p.n0_exponent),
          p.lambda_coefficient * std::pow(rate, p.lambda_exponent)};
}

double slab_density(double rate, const SnowParameters& p) {
  const auto dist = size_distribution(rate, p);
  if (dist.empty()) return 0.0;
  const double per_m3 = dist.number_density(p.min_diameter, p.max_diameter);
  const double thickness_m = dist.mean_diameter(p.min_diameter, p.max_diameter) * 1e-3;
  return per_m3 * thickness_m * p.density_scale;
}

std::size_t expected_particle_count(double max_range, double rate, const SnowParameters& p) {
  const double area = std::numbers::pi * max_range * max_range;
  return static_cast<std::size_t>(std::llround(area * slab_density(rate, p)));
}

namespace {

// Dense bucket grid over the sampling disc. Cells are at least one maximum
// diameter wide, so overlaps can only involve the 3x3 neighbourhood.
class ExclusionGrid {
 public:
  ExclusionGrid(double extent, double min_cell, std::size_t expected) : extent_(extent) {
    // About one particle per cell keeps both the table and the chains short.
    const double spacing = std::sqrt(4.0 * extent * extent / double(std::max<std::size_t>(expected, 1)));
    cell_ = std::max(min_cell, spacing);
    side_ = static_cast<std::int64_t>(std::ceil(2.0 * extent / cell_)) + 1;
    heads_.assign(std::size_t(side_ * side_), -1);
    next_.reserve(expected);
  }

  bool is_free(double x, double y, double radius, const std::vector<SnowParticle>& placed) const {
    const auto [ix, iy] = cell_of(x, y);
    for (std::int64_t cx = std::max<std::int64_t>(ix - 1, 0); cx <= std::min(ix + 1, side_ - 1); ++cx) {
      for (std::int64_t cy = std::max<std::int64_t>(iy - 1, 0); cy <= std::min(iy + 1, side_ - 1); ++cy) {
        for (std::int32_t k = heads_[std::size_t(cx * side_ + cy)]; k >= 0; k = next_[std::size_t(k)]) {
          const auto& q = placed[std::size_t(k)];
          const double min_d = radius + q.radius_m();
          const double ddx = q.cx - x, ddy = q.cy - y;
          if (ddx * ddx + ddy * ddy < min_d * min_d) return false;
        }
      }
    }
    return true;
  }

  void insert(double x, double y, std::int32_t index) {
    const auto [ix, iy] = cell_of(x, y);
    auto& head = heads_[std::size_t(ix * side_ + iy)];
    next_.push_back(head);
    head = index;
  }

 private:
  std::pair<std::int64_t, std::int64_t> cell_of(double x, double y) const noexcept {
    auto clamp = [&](double v) {
      const auto c = static_cast<std::int64_t>(std::floor((v + extent_) / cell_));
      return std::min(std::max<std::int64_t>(c, 0), side_ - 1);
    };
    return {clamp(x), clamp(y)};
  }

  double extent_;
  double cell_ = 0.0;
  std::int64_t side_ = 1;
  std::vector<std::int32_t> heads_;
  std::vector<std::int32_t> next_;
};

}  // namespace

ParticleField sample_field(double max_range, double rate, std::uint64_t seed,
                           const SnowParameters& p) {
  if (!(rate >= 0.0 && rate <= 10.0)) throw DomainError("snowfall rate must lie in [0, 10] mm/h");
  if (!(max_range > 0.0)) throw DomainError("sampling radius must be > 0");
  if (!(p.min_diameter > 0.0 && p.max_diameter > p.min_diameter)) {
    throw DomainError("diameter truncation must satisfy 0 < min < max");
  }

  ParticleField field;
  field.rate = rate;
  field.max_range = max_range;
  field.seed = seed;

  const std::size_t count = expected_particle_count(max_range, rate, p);
  if (count == 0) return field;
  if (count > std::size_t(std::numeric_limits<std::int32_t>::max())) {
    throw SamplingError("particle count exceeds index range");
  }

  const auto dist = size_distribution(rate, p);
  Rng rng(seed);
  ExclusionGrid grid(max_range, p.max_diameter * 1e-3, count);
  field.particles.reserve(count);

  for (std::size_t k = 0; k < count; ++k) {
    const double d = sample_truncated_exponential(rng, dist.lambda, p.min_diameter, p.max_diameter);
    const double radius = d * 0.5e-3;
    bool placed = false;
    for (int attempt = 0; attempt < p.max_attempts; ++attempt) {
      const double r = max_range * std::sqrt(rng.uniform());
      const double phi = 2.0 * std::numbers::pi * rng.uniform();
      const double x = r * std::cos(phi), y = r * std::sin(phi);
      if (grid.is_free(x, y, radius, field.particles)) {
        grid.insert(x, y, static_cast<std::int32_t>(field.particles.size()));
        field.particles.push_back({x, y, d});
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw SamplingError("could not place particle " + std::to_string(k) + " after " +
                          std::to_string(p.max_attempts) + " attempts");
    }
  }
  return field;
}

void write_field_csv(std::ostream& out, const ParticleField& field) {
  out << "cx,cy,D\n" << std::setprecision(17);
  for (const auto& q : field.particles) out << q.cx << ',' << q.cy << ',' << q.diameter << '\n';
}

}  // namespace snowsim
