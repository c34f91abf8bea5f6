#include <doctest.h>

#include <cmath>
#include <numbers>

#include "snowsim/errors.hpp"
#include "snowsim/random.hpp"
#include "snowsim/wet_ground.hpp"
#include "synthetic.hpp"

using namespace snowsim;
using std::numbers::pi;

namespace {

constexpr double kDeg = pi / 180.0;

PointCloud flat_ground(Rng& rng, std::size_t n, double z) {
  PointCloud pc;
  for (std::size_t k = 0; k < n; ++k) {
    pc.points.push_back({float(rng.uniform(-30.0, 30.0)), float(rng.uniform(-30.0, 30.0)), float(z), 10.0f,
                         std::nullopt});
  }
  return pc;
}

// Power reflectances from the amplitude reflection coefficients.
struct HandFresnel {
  double r_perp, r_par;
};
HandFresnel hand_fresnel(double ai, double n1, double n2) {
  const double at = std::asin(n1 / n2 * std::sin(ai));
  const double rs = (n1 * std::cos(ai) - n2 * std::cos(at)) / (n1 * std::cos(ai) + n2 * std::cos(at));
  const double rp = (n2 * std::cos(ai) - n1 * std::cos(at)) / (n2 * std::cos(ai) + n1 * std::cos(at));
  return {rs * rs, rp * rp};
}

// Thin-film reflectance with transmittances from energy conservation.
double hand_total(double ai, double rho) {
  const double at = std::asin(std::sin(ai) / 1.33);
  const auto in = hand_fresnel(ai, 1.0, 1.33);
  const auto out = hand_fresnel(at, 1.33, 1.0);
  const double perp = (1 - in.r_perp) * rho * (1 - out.r_perp) / (1 - rho * out.r_perp);
  const double par = (1 - in.r_par) * rho * (1 - out.r_par) / (1 - rho * out.r_par);
  return std::max(perp, par);
}

}  // namespace

TEST_SUITE("wet_ground") {
  TEST_CASE("noiseless plane is recovered") {
    Rng rng(1);
    const auto pc = flat_ground(rng, 500, -1.73);
    const auto plane = fit_ground_plane(pc, {.seed = 4});
    CHECK(plane.normal.z() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(plane.normal.x()) < 1e-9);
    CHECK(std::abs(plane.normal.y()) < 1e-9);
    CHECK(plane.intercept == doctest::Approx(double(-1.73f)).epsilon(1e-9));
    CHECK(plane.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("plane survives 30% outliers") {
    Rng rng(2);
    auto pc = flat_ground(rng, 700, -1.73);
    for (int k = 0; k < 300; ++k) {
      pc.points.push_back({float(rng.uniform(-30.0, 30.0)), float(rng.uniform(-30.0, 30.0)),
                           float(rng.uniform(-3.0, -1.0)), 5.0f, std::nullopt});
    }
    const auto plane = fit_ground_plane(pc, {.seed = 9});
    CHECK(std::acos(std::min(1.0, plane.normal.z())) < 1.0 * kDeg);
    CHECK(std::abs(plane.intercept + 1.73) < 0.01);
  }

  TEST_CASE("tilted plane and upward orientation") {
    Rng rng(3);
    PointCloud pc;
    const Eigen::Vector3d n = Eigen::Vector3d(0.05, -0.03, 1.0).normalized();
    for (int k = 0; k < 400; ++k) {
      const double x = rng.uniform(-20.0, 20.0), y = rng.uniform(-20.0, 20.0);
      const double z = (-1.7 - n.x() * x - n.y() * y) / n.z();
      pc.points.push_back({float(x), float(y), float(z), 1.0f, std::nullopt});
    }
    const auto plane = fit_ground_plane(pc, {.candidate_max_z = 0.0, .seed = 1});
    CHECK(plane.normal.dot(n) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(plane.intercept == doctest::Approx(-1.7).epsilon(1e-5));
  }

  TEST_CASE("degenerate geometry raises an estimation error") {
    PointCloud line;
    for (int k = 0; k < 100; ++k) line.points.push_back({float(k), 0.0f, -1.73f, 1.0f, std::nullopt});
    CHECK_THROWS_AS((void)fit_ground_plane(line), EstimationError);
    PointCloud high;
    high.points.push_back({1.0f, 1.0f, 0.0f, 1.0f, std::nullopt});
    CHECK_THROWS_AS((void)fit_ground_plane(high), EstimationError);
  }

  TEST_CASE("snell") {
    CHECK(*snell(0.0, 1.0, 1.33) == 0.0);
    CHECK(*snell(0.4, 1.2, 1.2) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(*snell(45.0 * kDeg, 1.0, 1.33) / kDeg == doctest::Approx(32.12).epsilon(1e-4));
    CHECK_FALSE(snell(60.0 * kDeg, 1.33, 1.0).has_value());
  }

  TEST_CASE("fresnel coefficients") {
    const auto normal = fresnel_power(0.0, 1.0, 1.33);
    const double expected = std::pow((1.0 - 1.33) / (1.0 + 1.33), 2);
    CHECK(normal.r_perp == doctest::Approx(expected).epsilon(1e-14));
    CHECK(normal.r_par == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(0.02006).epsilon(1e-3));

    const auto brewster = fresnel_power(std::atan(1.33), 1.0, 1.33);
    CHECK(std::abs(brewster.r_par) < 1e-12);
    CHECK(std::atan(1.33) / kDeg == doctest::Approx(53.06).epsilon(1e-4));

    for (double a = 0.0; a < 89.9; a += 0.5) {
      for (const auto [n1, n2] : {std::pair{1.0, 1.33}, std::pair{1.33, 1.0}}) {
        const auto f = fresnel_power(a * kDeg, n1, n2);
        CHECK(std::abs(f.r_perp + f.t_perp - 1.0) <= 1e-12);
        CHECK(std::abs(f.r_par + f.t_par - 1.0) <= 1e-12);
        if (snell(a * kDeg, n1, n2)) {
          const auto h = hand_fresnel(a * kDeg, n1, n2);
          CHECK(f.r_perp == doctest::Approx(h.r_perp).epsilon(1e-12));
          CHECK(f.r_par == doctest::Approx(h.r_par).epsilon(1e-12));
        } else {
          CHECK(f.r_perp == 1.0);
          CHECK(f.t_par == 0.0);
        }
      }
    }
  }

  TEST_CASE("film reflectance: zero, series, bound") {
    const WetParams w{1.2};
    CHECK(total_transmission(0.3, 0.0, w) == 0.0);

    Rng rng(6);
    for (int k = 0; k < 2000; ++k) {
      const double a = rng.uniform(0.0, 85.0 * kDeg);
      const double rho = rng.uniform(0.0, 0.95);
      const double closed = total_transmission(a, rho, w);
      CHECK(std::abs(closed - total_transmission_series(a, rho, w, 101)) <= 1e-12);
      CHECK(closed == doctest::Approx(hand_total(a, rho)).epsilon(1e-12));
    }
    // Near grazing incidence the internal reflection approaches 1 and the
    // series needs many more terms.
    for (int k = 0; k < 100; ++k) {
      const double a = rng.uniform(85.0 * kDeg, 89.0 * kDeg);
      const double rho = rng.uniform(0.95, 0.999);
      CHECK(std::abs(total_transmission(a, rho, w) - total_transmission_series(a, rho, w, 200000)) <= 1e-12);
    }
    for (double a = 0.0; a <= 89.0; a += 0.25) {
      for (double rho = 0.0; rho <= 0.999; rho += 0.037) {
        CHECK(total_transmission(a * kDeg, rho, w) <= rho);
      }
    }
  }

  TEST_CASE("wetness weight") {
    CHECK(wetness_weight(0.0, 1.2) == 0.0);
    CHECK(wetness_weight(1.2, 1.2) == 1.0);
    CHECK(wetness_weight(0.6, 1.2) == doctest::Approx(0.5));
    CHECK(wetness_weight(3.0, 1.2) == 1.0);
    CHECK(wetness_weight(-1.0, 1.2) == 0.0);
  }

  TEST_CASE("dry water depth is the identity and non-ground is untouched") {
    const auto calib = testing::test_calibration(32);
    const auto scan = testing::ring_scan(calib, {.azimuth_steps = 360, .intensity_noise = 0.1, .seed = 2});
    GroundPlane plane;
    plane.intercept = -testing::kSensorHeight;
    const LinearRangeModel power{-1.2, 200.0, 0.0, 120.0};
    const LinearRangeModel noise{0.0, 2.0, 0.0, 120.0};
    const auto out = augment_wet(scan, plane, {0.0}, power, noise);
    REQUIRE(out.cloud.size() == scan.size());
    CHECK(out.stats.dropped == 0);
    for (std::size_t k = 0; k < scan.size(); ++k) {
      const auto& a = scan.points[k];
      const auto& b = out.cloud.points[k];
      CHECK(b.x == a.x);
      CHECK(b.y == a.y);
      CHECK(b.z == a.z);
      CHECK(std::abs(b.intensity - a.intensity) <= 1e-6f * std::max(1.0f, a.intensity));
    }

    const auto wet = augment_wet(scan, plane, {1.2}, power, noise);
    std::size_t j = 0;
    for (std::size_t k = 0; k < scan.size(); ++k) {
      if (wet.labels[k] == PointLabel::Dropped) {
        CHECK(plane.is_ground(scan.points[k]));
        continue;
      }
      const auto& o = wet.cloud.points[j++];
      CHECK(o.x == scan.points[k].x);
      CHECK(o.z == scan.points[k].z);
      if (!plane.is_ground(scan.points[k])) CHECK(same_payload(o, scan.points[k]));
    }
    CHECK(j == wet.cloud.size());
    CHECK(wet.stats.total() == scan.size());
  }

  TEST_CASE("grazing ground return under full water is lost") {
    GroundPlane plane;
    plane.intercept = -1.73;
    const LinearRangeModel power{0.0, 100.0, 0.0, 1000.0};
    const LinearRangeModel noise{0.0, 0.12, 0.0, 1000.0};
    const auto ground_point = [](double planar) {
      const float cos_a = float(1.73 / std::hypot(planar, 1.73));
      return LidarPoint{float(planar), 0.0f, -1.73f, 0.35f * cos_a * 100.0f, std::nullopt};
    };
    PointCloud pc;
    pc.points.push_back(ground_point(330.0));  // ~89.7 deg incidence
    pc.points.push_back(ground_point(0.3));    // ~10 deg incidence
    pc.points.push_back(ground_point(20.0));   // ~85 deg incidence
    pc.points.push_back({10.0f, 0.0f, 2.0f, 50.0f, std::nullopt});  // wall, not ground

    const auto out = augment_wet(pc, plane, {1.2}, power, noise);

    std::vector<double> expected;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& p = pc.points[k];
      const double cos_a = std::abs(double(p.z)) / p.range();
      const double rho = p.intensity / (cos_a * 100.0);
      // Full film: rho_w = T_total / cos(alpha), i' = rho_w cos(alpha) P.
      expected.push_back(hand_total(std::acos(cos_a), rho) / cos_a * cos_a * 100.0);
    }
    REQUIRE(pc.points[0].intensity > 0.12f);
    REQUIRE(expected[0] < 0.12);
    CHECK(out.labels[0] == PointLabel::Dropped);

    REQUIRE(expected[1] > 0.12);
    REQUIRE(expected[1] < pc.points[1].intensity);
    CHECK(out.labels[1] == PointLabel::Attenuated);
    CHECK(out.cloud.points[0].intensity == doctest::Approx(expected[1]).epsilon(1e-6));

    // Between those extremes the film model brightens the return.
    REQUIRE(expected[2] > pc.points[2].intensity);
    CHECK(out.labels[2] == PointLabel::Unchanged);
    CHECK(out.cloud.points[1].intensity == doctest::Approx(expected[2]).epsilon(1e-6));

    CHECK(out.labels[3] == PointLabel::Unchanged);
    CHECK(out.cloud.size() == 3);
    CHECK(out.stats.dropped == 1);
  }

  TEST_CASE("drops are non-decreasing in water depth") {
    Rng rng(8);
    PointCloud pc;
    const LinearRangeModel power{-0.1, 100.0, 0.0, 1000.0};
    const LinearRangeModel noise{-0.002, 2.0, 0.0, 1000.0};
    for (int k = 0; k < 4000; ++k) {
      const double planar = std::exp(rng.uniform(std::log(0.05), std::log(600.0)));
      const double b = rng.uniform(-pi, pi);
      const double range = std::hypot(planar, 1.73);
      const double i = rng.uniform(0.05, 0.6) * (1.73 / range) * power(range) * rng.uniform(0.8, 1.2);
      pc.points.push_back({float(planar * std::cos(b)), float(planar * std::sin(b)), -1.73f, float(i), std::nullopt});
    }
    GroundPlane plane;
    plane.intercept = -1.73;
    std::size_t prev = 0;
    for (double dw = 0.0; dw <= 1.5; dw += 0.05) {
      const auto n = augment_wet(pc, plane, {dw}, power, noise).stats.dropped;
      CHECK(n >= prev);
      prev = n;
    }
    CHECK(prev > 0);
  }

  TEST_CASE("sampled water depths stay in range and follow the truncated law") {
    Rng rng(10);
    std::vector<double> s;
    for (int k = 0; k < 5000; ++k) {
      s.push_back(sample_water_depth(rng));
      CHECK(s.back() >= 0.1);
      CHECK(s.back() <= 1.2);
    }
    double mean = 0.0;
    for (double v : s) mean += v / double(s.size());
    // Mean of Exp(rate 2.5) truncated to [0.1, 1.2]: 0.1 + 0.4 - 1.1 e^{-2.75} / (1 - e^{-2.75}).
    const double e = std::exp(-2.75);
    CHECK(mean == doctest::Approx(0.5 - 1.1 * e / (1.0 - e)).epsilon(0.02));
  }

  TEST_CASE("negative water depth is rejected") {
    CHECK_THROWS_AS((void)augment_wet({}, {}, {-0.1}, {}, {}), ConfigError);
  }
}
