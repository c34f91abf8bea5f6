#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace snowsim {

/// SplitMix64 finalizer. Used to derive independent child seeds, e.g. one per
/// (frame, layer) pair, from a single master seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t child) noexcept {
  return mix_seed(parent ^ mix_seed(child + 0x632be59bd9b4e019ULL));
}

/// 64-bit engine with a platform-independent uniform double draw.
/// std::uniform_real_distribution is implementation-defined, which would make
/// sampled fields differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

  /// Uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    // Lemire-style rejection keeps the draw unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

  std::uint64_t next() noexcept { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Inverse-CDF draw from an exponential with rate `lambda` truncated to [lo, hi].
inline double sample_truncated_exponential(Rng& rng, double lambda, double lo, double hi) {
  const double span = hi - lo;
  const double u = rng.uniform();
  // -expm1(-x) = 1 - exp(-x), accurate for small x.
  const double mass = -std::expm1(-lambda * span);
  return lo - std::log1p(-u * mass) / lambda;
}

/// CDF of the same truncated exponential.
inline double truncated_exponential_cdf(double x, double lambda, double lo, double hi) {
  if (x <= lo) return 0.0;
  if (x >= hi) return 1.0;
  return std::expm1(-lambda * (x - lo)) / std::expm1(-lambda * (hi - lo));
}

}  // namespace snowsim
