#include "snowsim/wet_ground.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "snowsim/errors.hpp"

namespace snowsim {
namespace {

Eigen::Vector3d position(const LidarPoint& p) noexcept { return {p.x, p.y, p.z}; }

}  // namespace

bool GroundPlane::is_ground(const LidarPoint& p) const noexcept {
  return std::abs(signed_distance(position(p))) < band;
}

double GroundPlane::incidence(const LidarPoint& p) const noexcept {
  const double r0 = p.range();
  const double c = std::min(1.0, std::abs(position(p).dot(normal)) / (r0 * normal.norm()));
  return std::acos(c);
}

GroundPlane fit_ground_plane(const PointCloud& pc, const RansacConfig& cfg) {
  std::vector<Eigen::Vector3d> cand;
  for (const auto& p : pc.points) {
    if (p.z < cfg.candidate_max_z) cand.push_back(position(p));
  }
  if (cand.size() < 3) throw EstimationError("fewer than three ground candidates");

  Rng rng(cfg.seed);
  const auto n = static_cast<std::uint64_t>(cand.size());
  Eigen::Vector3d best_normal = Eigen::Vector3d::Zero();
  double best_h = 0.0;
  std::size_t best_count = 0;

  for (int it = 0; it < cfg.iterations; ++it) {
    const auto i0 = rng.below(n);
    auto i1 = rng.below(n - 1);
    if (i1 >= i0) ++i1;
    auto i2 = rng.below(n - 2);
    for (auto lo = std::min(i0, i1), hi = std::max(i0, i1); const auto skip : {lo, hi}) {
      if (i2 >= skip) ++i2;
    }
    const Eigen::Vector3d u = cand[i1] - cand[i0];
    const Eigen::Vector3d v = cand[i2] - cand[i0];
    Eigen::Vector3d normal = u.cross(v);
    const double norm = normal.norm();
    if (!(norm > 1e-9 * u.norm() * v.norm())) continue;
    normal /= norm;
    const double h = normal.dot(cand[i0]);
    std::size_t count = 0;
    for (const auto& p : cand) count += std::abs(p.dot(normal) - h) < cfg.inlier_tolerance;
    if (count > best_count) {
      best_count = count;
      best_normal = normal;
      best_h = h;
    }
  }
  if (best_count < 3) throw EstimationError("RANSAC found no non-degenerate plane");

  // Least-squares refit: normal = least-variance direction of the inliers.
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  std::vector<const Eigen::Vector3d*> inliers;
  for (const auto& p : cand) {
    if (std::abs(p.dot(best_normal) - best_h) < cfg.inlier_tolerance) {
      inliers.push_back(&p);
      centroid += p;
    }
  }
  centroid /= double(inliers.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto* p : inliers) {
    const Eigen::Vector3d d = *p - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const auto& values = eig.eigenvalues();
  if (values(1) <= 1e-12 * std::max(1.0, values(2))) {
    throw EstimationError("ground inliers are collinear");
  }

  GroundPlane plane;
  plane.normal = eig.eigenvectors().col(0).normalized();
  if (plane.normal.z() < 0.0) plane.normal = -plane.normal;
  plane.intercept = plane.normal.dot(centroid);
  plane.band = cfg.band;
  return plane;
}

std::vector<GroundSample> ground_samples(const PointCloud& pc, const GroundPlane& plane) {
  std::vector<GroundSample> out;
  for (const auto& p : pc.points) {
    if (plane.is_ground(p)) out.push_back({p.range(), p.intensity, plane.incidence(p)});
  }
  return out;
}

std::optional<double> snell(double alpha_in, double n_in, double n_out) noexcept {
  const double s = n_in / n_out * std::sin(alpha_in);
  if (s > 1.0) return std::nullopt;
  return std::asin(s);
}

FresnelPower fresnel_power(double alpha_in, double n_in, double n_out) noexcept {
  const auto alpha_out = snell(alpha_in, n_in, n_out);
  if (!alpha_out || alpha_in >= 0.5 * std::numbers::pi) return {};
  const double ci = std::cos(alpha_in);
  const double ct = std::cos(*alpha_out);
  const double perp_den = n_in * ci + n_out * ct;
  const double par_den = n_out * ci + n_in * ct;
  const double r_perp = (n_in * ci - n_out * ct) / perp_den;
  const double r_par = (n_out * ci - n_in * ct) / par_den;
  const double t_perp = 2.0 * n_in * ci / perp_den;
  const double t_par = 2.0 * n_in * ci / par_den;
  const double geom = (n_out * ct) / (n_in * ci);
  return {r_perp * r_perp, r_par * r_par, geom * t_perp * t_perp, geom * t_par * t_par};
}

double wetness_weight(double water_depth, double tread_depth) noexcept {
  return std::min(std::max(water_depth / tread_depth, 0.0), 1.0);
}

namespace {

struct FilmCoefficients {
  FresnelPower air;    // entering the film
  FresnelPower water;  // at the film surface, from inside
  bool enters = false;
};

FilmCoefficients film(double alpha_in, const WetParams& w) noexcept {
  FilmCoefficients f;
  const auto refracted = snell(alpha_in, w.n_air, w.n_water);
  if (!refracted) return f;
  f.air = fresnel_power(alpha_in, w.n_air, w.n_water);
  f.water = fresnel_power(*refracted, w.n_water, w.n_air);
  f.enters = true;
  return f;
}

}  // namespace

double total_transmission(double alpha_in, double rho_0, const WetParams& params) {
  const auto f = film(alpha_in, params);
  if (!f.enters) return 0.0;
  auto closed = [&](double t_air, double t_water, double r_water) {
    const double q = rho_0 * r_water;
    if (q >= 1.0) throw DomainError("thin-film series diverges: rho_0 * R_water >= 1");
    return t_air * rho_0 * t_water / (1.0 - q);
  };
  return std::max(closed(f.air.t_perp, f.water.t_perp, f.water.r_perp),
                  closed(f.air.t_par, f.water.t_par, f.water.r_par));
}

double total_transmission_series(double alpha_in, double rho_0, const WetParams& params, int terms) {
  const auto f = film(alpha_in, params);
  if (!f.enters) return 0.0;
  auto partial = [&](double t_air, double t_water, double r_water) {
    double sum = 0.0, power = 1.0;
    for (int k = 0; k < terms; ++k) {
      sum += power;
      power *= rho_0 * r_water;
    }
    return t_air * rho_0 * t_water * sum;
  };
  return std::max(partial(f.air.t_perp, f.water.t_perp, f.water.r_perp),
                  partial(f.air.t_par, f.water.t_par, f.water.r_par));
}

AugmentationResult augment_wet(const PointCloud& pc, const GroundPlane& plane, const WetParams& params,
                               const LinearRangeModel& power, const LinearRangeModel& noise_floor) {
  if (!(params.water_depth >= 0.0) || !(params.tread_depth > 0.0)) {
    throw ConfigError("water depth must be >= 0 and tread depth > 0");
  }
  AugmentationResult result;
  result.cloud.frame_id = pc.frame_id;
  result.cloud.points.reserve(pc.size());
  result.labels.assign(pc.size(), PointLabel::Unchanged);
  const double gamma = wetness_weight(params.water_depth, params.tread_depth);

  for (std::size_t k = 0; k < pc.size(); ++k) {
    const auto& p = pc.points[k];
    if (!plane.is_ground(p)) {
      result.cloud.points.push_back(p);
      continue;
    }
    const double r0 = p.range();
    const double alpha = plane.incidence(p);
    const double cos_a = std::cos(alpha);
    const double p_r0 = power(r0);
    if (!(cos_a > 0.0) || !(p_r0 > 0.0)) {
      result.cloud.points.push_back(p);
      continue;
    }
    const double rho_raw = p.intensity / (cos_a * p_r0);
    const double rho = std::clamp(rho_raw, 0.0, kMaxGroundReflectivity);
    if (rho != rho_raw) ++result.stats.reflectivity_clamped;

    const double wet = gamma > 0.0 ? total_transmission(alpha, rho, params) / cos_a : 0.0;
    const double rho_w = (1.0 - gamma) * rho_raw + gamma * wet;
    // Decide on the stored precision so a dry frame round-trips exactly.
    const float intensity = static_cast<float>(rho_w * cos_a * p_r0);

    if (intensity <= noise_floor(r0) && intensity < p.intensity) {
      result.labels[k] = PointLabel::Dropped;
      continue;
    }
    LidarPoint out = p;
    out.intensity = intensity;
    if (out.intensity < p.intensity) result.labels[k] = PointLabel::Attenuated;
    result.cloud.points.push_back(out);
  }
  for (const auto label : result.labels) result.stats.count(label);
  return result;
}

double sample_water_depth(Rng& rng, double mean, double lo, double hi) {
  return sample_truncated_exponential(rng, 1.0 / mean, lo, hi);
}

}  // namespace snowsim
