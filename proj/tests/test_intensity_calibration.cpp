#include <doctest.h>

#include <cmath>

#include "snowsim/intensity_calibration.hpp"
#include "snowsim/random.hpp"

using namespace snowsim;

TEST_SUITE("intensity_calibration") {
  TEST_CASE("zero focal slope is the identity") {
    const LaserCalibration laser{0.0, 0.4, 255.0, 0.0};
    CHECK(invert_calibration(37.5, 20.0, 120.0, laser) == 37.5);
    CHECK(apply_calibration(37.5, 20.0, 120.0, laser) == 37.5);
  }

  TEST_CASE("correction vanishes at its root") {
    const LaserCalibration laser{2.0, 0.2, 255.0, 0.0};
    const double r_max = 120.0;
    const double root = r_max * (1.0 - laser.focal_offset());
    CHECK(std::abs(divergence_correction(root, r_max, laser)) < 1e-20);
    CHECK(invert_calibration(80.0, root, r_max, laser) == doctest::Approx(80.0).epsilon(1e-12));
    CHECK(apply_calibration(80.0, root, r_max, laser) == doctest::Approx(80.0).epsilon(1e-12));
  }

  TEST_CASE("focal offset") {
    const LaserCalibration laser{1.0, 1.0 - 13100.0 * 0.01, 255.0, 0.0};
    CHECK(laser.focal_offset() == doctest::Approx(1e-4).epsilon(1e-9));
  }

  TEST_CASE("apply and invert are mutual inverses") {
    Rng rng(3);
    for (int k = 0; k < 10000; ++k) {
      const LaserCalibration laser{rng.uniform(0.0, 5.0), rng.uniform(-2000.0, 1.0), 255.0, 0.0};
      const double r_max = 120.0;
      const double range = rng.uniform(1e-3, r_max);
      const double i = rng.uniform(0.0, 255.0);
      const double there = apply_calibration(invert_calibration(i, range, r_max, laser), range, r_max, laser);
      const double back = invert_calibration(apply_calibration(i, range, r_max, laser), range, r_max, laser);
      const double scale = std::max(1.0, std::abs(i));
      REQUIRE(std::abs(there - i) <= 1e-9 * scale);
      REQUIRE(std::abs(back - i) <= 1e-9 * scale);
    }
  }

  TEST_CASE("inversion is increasing in intensity") {
    const LaserCalibration laser{1.3, 0.25, 255.0, 0.0};
    double prev = -1e300;
    for (double i = 0.0; i <= 255.0; i += 0.5) {
      const double p = invert_calibration(i, 42.0, 120.0, laser);
      CHECK(p > prev);
      prev = p;
    }
  }

  TEST_CASE("negative power is clamped and flagged") {
    const LaserCalibration laser{50.0, 0.0, 255.0, 0.0};
    const auto low = invert_calibration_clamped(1.0, 1.0, 120.0, laser);
    CHECK(low.clamped);
    CHECK(low.power == 0.0);
    const auto high = invert_calibration_clamped(200.0, 1.0, 120.0, laser);
    CHECK_FALSE(high.clamped);
    CHECK(high.power == doctest::Approx(invert_calibration(200.0, 1.0, 120.0, laser)));
  }

  TEST_CASE("scaled write-back multiplies the correction by i_max") {
    const LaserCalibration laser{0.8, 0.1, 100.0, 0.0};
    const double c = divergence_correction(30.0, 120.0, laser);
    CHECK(apply_calibration_scaled(5.0, 30.0, 120.0, laser) == doctest::Approx(5.0 + 100.0 * c));
  }
}
