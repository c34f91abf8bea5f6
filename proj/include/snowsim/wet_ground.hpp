#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "snowsim/augmentation.hpp"
#include "snowsim/point_cloud.hpp"
#include "snowsim/random.hpp"
#include "snowsim/range_model.hpp"

namespace snowsim {

/// Ground plane {p : p . normal = intercept} with a unit, upward normal.
struct GroundPlane {
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  double intercept = 0.0;  // m
  double band = 0.5;       // m, half-width of the ground band (epsilon_g)

  double signed_distance(const Eigen::Vector3d& p) const noexcept { return p.dot(normal) - intercept; }
  bool is_ground(const LidarPoint& p) const noexcept;
  /// Angle between the beam toward `p` and the surface normal, in [0, pi/2].
  double incidence(const LidarPoint& p) const noexcept;
};

struct RansacConfig {
  int iterations = 200;
  double inlier_tolerance = 0.05;  // m
  /// Only points with z below this height (sensor frame) are candidates.
  double candidate_max_z = -1.0;
  std::uint64_t seed = 0;
  double band = 0.5;  // copied into the resulting GroundPlane
};

/// 3-point RANSAC over the candidate points followed by a least-squares refit
/// on the inliers of the best model. Throws EstimationError when fewer than
/// three candidates exist or every sample is degenerate (collinear).
GroundPlane fit_ground_plane(const PointCloud& pc, const RansacConfig& cfg = {});

/// Ground samples (range, intensity, incidence) for power/noise estimation.
std::vector<GroundSample> ground_samples(const PointCloud& pc, const GroundPlane& plane);

/// Refraction angle from Snell's law; empty on total internal reflection.
std::optional<double> snell(double alpha_in, double n_in, double n_out) noexcept;

/// Fresnel power coefficients of a planar dielectric interface.
struct FresnelPower {
  double r_perp = 1.0;
  double r_par = 1.0;
  double t_perp = 0.0;
  double t_par = 0.0;
};

/// Power reflectance R = r^2 and transmittance
/// T = (n_out cos a_out) / (n_in cos a_in) * t^2 for both polarizations,
/// using the textbook amplitude coefficients. At or beyond the critical
/// angle R = 1 and T = 0.
FresnelPower fresnel_power(double alpha_in, double n_in, double n_out) noexcept;

struct WetParams {
  double water_depth = 0.0;  // d_w, mm
  double tread_depth = 1.2;  // d_p, mm
  double n_air = 1.0;
  double n_water = 1.33;
};

/// Blend weight min(max(d_w / d_p, 0), 1).
double wetness_weight(double water_depth, double tread_depth) noexcept;

/// Effective reflectance of ground with reflectivity `rho_0` under a water
/// film: per polarization T_air * rho_0 * T_water / (1 - rho_0 * R_water),
/// the closed form of the multiple-bounce series, maximized over the two
/// polarizations. Throws DomainError if rho_0 * R_water >= 1.
double total_transmission(double alpha_in, double rho_0, const WetParams& params);

/// Same quantity as a partial sum of the bounce series with `terms` terms.
double total_transmission_series(double alpha_in, double rho_0, const WetParams& params, int terms);

inline constexpr double kMaxGroundReflectivity = 0.999;

/// Wet-ground augmentation. Non-ground points are untouched. Ground points
/// get their intensity rescaled from the dry reflectivity toward the wet
/// reflectance; a ground point is dropped when its new intensity is both
/// lower than before and not above the noise floor at its range. Positions
/// never change.
AugmentationResult augment_wet(const PointCloud& pc, const GroundPlane& plane, const WetParams& params,
                               const LinearRangeModel& power, const LinearRangeModel& noise_floor);

/// Per-frame water depth: exponential with the given mean truncated to
/// [lo, hi] mm.
double sample_water_depth(Rng& rng, double mean = 0.4, double lo = 0.1, double hi = 1.2);

}  // namespace snowsim
