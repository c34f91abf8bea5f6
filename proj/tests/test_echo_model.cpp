#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "snowsim/echo_model.hpp"
#include "snowsim/errors.hpp"
#include "snowsim/random.hpp"
#include "snowsim/sensor_calibration.hpp"

using namespace snowsim;

namespace {

constexpr double kTau = 10e-9;
const double kWidth = kSpeedOfLight * kTau;

struct FinePeak {
  double power = -1.0;
  double argmax = 0.0;
};

FinePeak fine_grid_peak(const EchoProfile& profile, double step) {
  double lo = 1e300, hi = -1e300;
  for (const auto& t : profile.terms) {
    lo = std::min(lo, t.start);
    hi = std::max(hi, t.end());
  }
  FinePeak best;
  const auto n = std::size_t(std::ceil((hi - lo) / step));
  for (std::size_t k = 0; k <= n; ++k) {
    const double r = lo + double(k) * step;
    double p = 0.0;
    for (const auto& t : profile.terms) {
      if (r >= t.start && r <= t.end()) {
        const double s = std::sin(3.14159265358979323846 * (r - t.start) / t.width);
        p += t.amplitude * s * s;
      }
    }
    if (p > best.power) best = {p, r};
  }
  return best;
}

}  // namespace

TEST_SUITE("echo_model") {
  TEST_CASE("overlap ramp") {
    CHECK(overlap(0.5, 0.5, 2.0) == 0.0);
    CHECK(overlap(0.1, 0.5, 2.0) == 0.0);
    CHECK(overlap(2.0, 0.5, 2.0) == 1.0);
    CHECK(overlap(7.0, 0.5, 2.0) == 1.0);
    CHECK(overlap(1.25, 0.5, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  }

  TEST_CASE("pulse shape") {
    CHECK(pulse_power(kTau, 3.0, kTau) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(pulse_power(0.0, 3.0, kTau) == 0.0);
    CHECK(std::abs(pulse_power(2.0 * kTau, 3.0, kTau)) < 1e-15);
    CHECK(pulse_power(-1e-12, 3.0, kTau) == 0.0);
    CHECK(pulse_power(2.0 * kTau + 1e-12, 3.0, kTau) == 0.0);
    CHECK(pulse_power(0.5 * kTau, 3.0, kTau) == doctest::Approx(1.5).epsilon(1e-14));
  }

  TEST_CASE("echo width for a 10 ns pulse is about 3 m") {
    CHECK(std::abs(kWidth - 2.998) <= 1e-3);
  }

  TEST_CASE("lobe peak and support") {
    const EchoTerm t{2.5, 10.0, kWidth};
    CHECK(echo_lobe(t, 10.0 + 0.5 * kWidth) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(echo_lobe(t, 9.99) == 0.0);
    CHECK(echo_lobe(t, 10.0 + kWidth + 0.01) == 0.0);
    CHECK(echo_lobe(t, 10.0) == 0.0);
  }

  TEST_CASE("amplitude formula") {
    const double a = echo_amplitude(2.0, 0.9, 0.001, 0.003, 1.25, 0.5, 2.0);
    CHECK(a == doctest::Approx(2.0 * 0.9 * (0.001 / 0.003) * 0.5 / (1.25 * 1.25)).epsilon(1e-14));
    CHECK(echo_amplitude(2.0, 0.9, 0.001, 0.003, 0.4, 0.5, 2.0) == 0.0);
  }

  TEST_CASE("lobe equals the numerically convolved pulse") {
    Rng rng(31);
    const double theta = 0.003;
    for (int trial = 0; trial < 10; ++trial) {
      const double rj = rng.uniform(0.6, 80.0);
      const double ca = rng.uniform(0.5, 50.0);
      const double rho = rng.uniform(0.05, 1.0);
      const double visible = rng.uniform(0.0, theta);
      const EchoTerm term{echo_amplitude(ca, rho, visible, theta, rj, 0.5, 2.0), rj, kWidth};
      const double gain = ca * rho * (visible / theta) * overlap(rj, 0.5, 2.0) / (rj * rj);
      for (int k = 0; k < 10; ++k) {
        const double r = rj + rng.uniform(-0.2, kWidth + 0.2);
        const double expected = testing::convolution_echo(r, rj, gain, 1.0, kTau);
        CHECK(std::abs(echo_lobe(term, r) - expected) <= 1e-6 * term.amplitude);
      }
    }
  }

  TEST_CASE("superposition is the sum of lobes") {
    Rng rng(2);
    EchoProfile profile;
    for (int k = 0; k < 15; ++k) profile.terms.push_back({rng.uniform(0.0, 5.0), rng.uniform(0.0, 20.0), kWidth});
    for (int k = 0; k < 200; ++k) {
      const double r = rng.uniform(-1.0, 25.0);
      double sum = 0.0;
      for (const auto& t : profile.terms) sum += echo_lobe(t, r);
      CHECK(profile(r) == doctest::Approx(sum).epsilon(1e-14));
    }
  }

  TEST_CASE("single lobe peaks at its start") {
    EchoProfile profile;
    profile.terms.push_back({4.0, 30.0, kWidth});
    const auto peak = max_peak(profile, kWidth / 100.0);
    CHECK(std::abs(peak.range - 30.0) <= 1e-4);
    CHECK(peak.power == doctest::Approx(4.0).epsilon(1e-8));
  }

  TEST_CASE("larger of two disjoint lobes wins") {
    EchoProfile profile;
    profile.terms.push_back({1.0, 5.0, kWidth});
    profile.terms.push_back({2.0, 20.0, kWidth});
    auto peak = max_peak(profile, kWidth / 100.0);
    CHECK(std::abs(peak.range - 20.0) <= 1e-4);
    CHECK(peak.power == doctest::Approx(2.0).epsilon(1e-8));
    std::swap(profile.terms[0].amplitude, profile.terms[1].amplitude);
    peak = max_peak(profile, kWidth / 100.0);
    CHECK(std::abs(peak.range - 5.0) <= 1e-4);
  }

  TEST_CASE("empty profile and bad step are domain errors") {
    EchoProfile empty;
    CHECK_THROWS_AS((void)max_peak(empty, 0.03), DomainError);
    EchoProfile one;
    one.terms.push_back({1.0, 1.0, kWidth});
    CHECK_THROWS_AS((void)max_peak(one, 0.0), DomainError);
  }

  TEST_CASE("overlapping lobes agree with a fine-grid search") {
    Rng rng(1234);
    for (int trial = 0; trial < 20; ++trial) {
      EchoProfile profile;
      const double base = rng.uniform(1.0, 40.0);
      for (int k = 0; k < 20; ++k) {
        profile.terms.push_back({rng.uniform(0.01, 1.0), base + rng.uniform(0.0, 6.0), kWidth});
      }
      const auto peak = max_peak(profile, kWidth / 100.0);
      const auto fine = fine_grid_peak(profile, 1e-4);
      CHECK(std::abs(peak.argmax - fine.argmax) <= 1e-3);
      CHECK(std::abs(peak.range - (fine.argmax - 0.5 * kWidth)) <= 1e-3);
      CHECK(std::abs(peak.power - fine.power) <= 1e-6 * fine.power);
    }
  }

  TEST_CASE("peak power is non-decreasing in any amplitude") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      EchoProfile profile;
      for (int k = 0; k < 8; ++k) profile.terms.push_back({rng.uniform(0.0, 1.0), rng.uniform(0.0, 8.0), kWidth});
      const double before = max_peak(profile, kWidth / 100.0).power;
      profile.terms[rng.below(8)].amplitude += rng.uniform(0.0, 0.5);
      CHECK(max_peak(profile, kWidth / 100.0).power >= before - 1e-12);
    }
  }

  TEST_CASE("profile samples and csv") {
    EchoProfile profile;
    profile.terms.push_back({1.0, 2.0, kWidth});
    const auto samples = sample_profile(profile, kWidth / 100.0);
    REQUIRE(samples.size() >= 100);
    CHECK(samples.front().first == doctest::Approx(2.0));
    for (const auto& [r, p] : samples) CHECK(p == doctest::Approx(profile(r)));
    std::ostringstream out;
    write_profile_csv(out, samples);
    CHECK(out.str().rfind("R,P\n", 0) == 0);
  }
}
