#pragma once

#include <span>

namespace snowsim {

/// Intensity as an affine function of range, clamped at zero.
struct LinearRangeModel {
  double slope = 0.0;      // intensity per meter
  double intercept = 0.0;  // intensity
  double range_min = 0.0;  // meters; fitted support
  double range_max = 0.0;

  /// max(0, slope * R + intercept). Extrapolates linearly outside the support.
  double operator()(double range) const noexcept {
    const double v = slope * range + intercept;
    return v > 0.0 ? v : 0.0;
  }
};

struct GroundSample {
  double range = 0.0;      // m
  double intensity = 0.0;
  double incidence = 0.0;  // rad, angle to the surface normal
};

struct PowerNoiseModels {
  LinearRangeModel power;        // upper-quantile fit of i / cos(alpha)
  LinearRangeModel noise_floor;  // lower-quantile fit
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Linear quantile regression y ~ a + b x by iteratively reweighted least
/// absolute deviation, started from the least-squares line shifted onto the
/// residual quantile. Stops when the line no longer moves or after
/// `max_iterations` reweightings.
LineFit fit_quantile_line(std::span<const double> x, std::span<const double> y, double quantile,
                          int max_iterations = 200);

inline constexpr std::size_t kMinGroundSamples = 50;
inline constexpr double kMinGroundRangeSpan = 20.0;  // m

/// Fits the transmitted-power proxy (q = 0.95) and noise floor (q = 0.05) on
/// angle-normalized ground intensities. Throws EstimationError with fewer
/// than 50 samples, less than 20 m of range span, or crossing fits.
PowerNoiseModels estimate_power_and_noise(std::span<const GroundSample> ground,
                                          double upper_quantile = 0.95,
                                          double lower_quantile = 0.05);

}  // namespace snowsim
