#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "snowsim/dror.hpp"
#include "snowsim/errors.hpp"
#include "snowsim/random.hpp"
#include "synthetic.hpp"

using namespace snowsim;

namespace {

PointCloud clean_scene() {
  const auto calib = testing::test_calibration(32);
  return testing::ring_scan(calib, {.azimuth_steps = 1800, .seed = 4});
}

// `n` points on distinct sites of a 0.4 m lattice inside the default box;
// every site is farther from the others than any search radius there.
std::vector<LidarPoint> box_clutter(Rng& rng, std::size_t n) {
  std::vector<LidarPoint> sites;
  for (int i = 1; i <= 24; ++i) {
    for (int j = -2; j <= 2; ++j) {
      for (int k = -2; k <= 2; ++k) {
        sites.push_back({float(0.4 * i), float(0.4 * j), float(0.4 * k), 1.0f, std::nullopt});
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) std::swap(sites[k], sites[k + rng.below(sites.size() - k)]);
  sites.resize(n);
  return sites;
}

}  // namespace

TEST_SUITE("dror") {
  TEST_CASE("search radius") {
    const DrorConfig cfg;
    CHECK(search_radius({1.0f, 0.0f, 5.0f, 0.0f, std::nullopt}, cfg) == doctest::Approx(0.04));
    CHECK(search_radius({30.0f, 40.0f, 0.0f, 0.0f, std::nullopt}, cfg) == doctest::Approx(3.0 * 50.0 * 0.00349));
  }

  TEST_CASE("isolated point is removed, dense grid is kept") {
    PointCloud pc;
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) pc.points.push_back({5.0f + 0.01f * i, 0.01f * j, 0.0f, 1.0f, std::nullopt});
    }
    pc.points.push_back({20.0f, 10.0f, 0.0f, 1.0f, std::nullopt});
    const auto r = dror_filter(pc);
    CHECK(r.removed.size() == 1);
    CHECK(r.removed.points[0].x == 20.0f);
    CHECK(r.kept.size() == 400);
    CHECK(r.removed_mask.back());
  }

  TEST_CASE("matches brute-force neighbor counting") {
    Rng rng(12);
    const auto calib = testing::test_calibration(16, 60.0);
    for (int trial = 0; trial < 10; ++trial) {
      auto pc = testing::ring_scan(calib, {.azimuth_steps = 200, .seed = std::uint64_t(trial)});
      for (int k = 0; k < 300; ++k) {
        pc.points.push_back({float(rng.uniform(-20.0, 20.0)), float(rng.uniform(-20.0, 20.0)),
                             float(rng.uniform(-2.0, 2.0)), 1.0f, std::nullopt});
      }
      // Exact duplicates and a tight cluster exercise the boundary cases.
      pc.points.push_back(pc.points[0]);
      for (int k = 0; k < 4; ++k) pc.points.push_back({3.0f + 0.01f * k, 1.0f, 0.0f, 1.0f, std::nullopt});
      REQUIRE(pc.size() <= 5000);
      const DrorConfig cfg{.angular_resolution = 0.00349 * (1 + trial % 3), .min_neighbors = std::size_t(2 + trial % 4)};
      const auto r = dror_filter(pc, cfg);
      const auto want = testing::brute_force_dror(pc, cfg.angular_resolution, cfg.radius_multiplier,
                                                  cfg.min_neighbors, cfg.min_radius);
      CHECK(r.removed_mask == want);
      CHECK(r.kept.size() + r.removed.size() == pc.size());
    }
  }

  TEST_CASE("clean scene is clear") {
    const auto c = classify_snowfall(clean_scene());
    CHECK(c.removed_in_box == 0);
    CHECK(c.level == SnowfallClass::Clear);
  }

  TEST_CASE("injected clutter sets the class") {
    Rng rng(3);
    for (const auto [n, level] : {std::pair{9ul, SnowfallClass::Clear}, std::pair{10ul, SnowfallClass::Light},
                                  std::pair{50ul, SnowfallClass::Light}, std::pair{79ul, SnowfallClass::Light},
                                  std::pair{80ul, SnowfallClass::Heavy}}) {
      auto pc = clean_scene();
      for (const auto& p : box_clutter(rng, n)) pc.points.push_back(p);
      const auto c = classify_snowfall(pc);
      CHECK(c.removed_in_box == n);
      CHECK(c.level == level);

      // Count is invariant under reordering.
      Rng shuffle(n);
      for (std::size_t k = pc.size() - 1; k > 0; --k) std::swap(pc.points[k], pc.points[shuffle.below(k + 1)]);
      CHECK(classify_snowfall(pc).removed_in_box == n);
    }
  }

  TEST_CASE("class thresholds") {
    CHECK(classify_count(0) == SnowfallClass::Clear);
    CHECK(classify_count(9) == SnowfallClass::Clear);
    CHECK(classify_count(10) == SnowfallClass::Light);
    CHECK(classify_count(79) == SnowfallClass::Light);
    CHECK(classify_count(80) == SnowfallClass::Heavy);
    CHECK(std::string(to_string(SnowfallClass::Heavy)) == "heavy");
  }

  TEST_CASE("invalid configuration") {
    CHECK_THROWS_AS(validate(DrorConfig{.min_radius = 0.0}), ConfigError);
    CHECK_THROWS_AS(validate(DrorConfig{.angular_resolution = -1.0}), ConfigError);
  }
}
