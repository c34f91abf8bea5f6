#pragma once

#include "snowsim/sensor_calibration.hpp"

namespace snowsim {

/// Range-dependent beam-divergence correction f_s * |f_o - (1 - R/R_max)|^2.
double divergence_correction(double range, double max_range, const LaserCalibration& laser) noexcept;

/// Raw received power from a calibrated intensity: i - correction(R).
/// May be negative on noisy data; see invert_calibration_clamped.
double invert_calibration(double intensity, double range, double max_range,
                          const LaserCalibration& laser) noexcept;

/// Forward factory calibration: P_R + correction(R).
double apply_calibration(double power, double range, double max_range,
                         const LaserCalibration& laser) noexcept;

/// Variant used when writing simulated returns back to intensities:
/// P_R + i_max * correction(R).
double apply_calibration_scaled(double power, double range, double max_range,
                                const LaserCalibration& laser) noexcept;

struct InvertedPower {
  double power = 0.0;
  bool clamped = false;  // raw inversion was negative and was set to 0
};

InvertedPower invert_calibration_clamped(double intensity, double range, double max_range,
                                         const LaserCalibration& laser) noexcept;

}  // namespace snowsim
