#include "snowsim/intensity_calibration.hpp"

#include <cmath>

namespace snowsim {

double divergence_correction(double range, double max_range, const LaserCalibration& laser) noexcept {
  const double d = std::abs(laser.focal_offset() - (1.0 - range / max_range));
  return laser.focal_slope * d * d;
}

double invert_calibration(double intensity, double range, double max_range,
                          const LaserCalibration& laser) noexcept {
  return intensity - divergence_correction(range, max_range, laser);
}

double apply_calibration(double power, double range, double max_range,
                         const LaserCalibration& laser) noexcept {
  return power + divergence_correction(range, max_range, laser);
}

double apply_calibration_scaled(double power, double range, double max_range,
                                const LaserCalibration& laser) noexcept {
  return power + laser.max_intensity * divergence_correction(range, max_range, laser);
}

InvertedPower invert_calibration_clamped(double intensity, double range, double max_range,
                                         const LaserCalibration& laser) noexcept {
  const double p = invert_calibration(intensity, range, max_range, laser);
  if (p < 0.0) return {0.0, true};
  return {p, false};
}

}  // namespace snowsim
