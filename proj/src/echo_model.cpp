#include "snowsim/echo_model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "snowsim/errors.hpp"

namespace snowsim {

double overlap(double range, double r1, double r2) noexcept {
  if (range <= r1) return 0.0;
  if (range >= r2) return 1.0;
  return (range - r1) / (r2 - r1);
}

double pulse_power(double t, double p0, double tau_h) noexcept {
  if (t < 0.0 || t > 2.0 * tau_h) return 0.0;
  const double s = std::sin(std::numbers::pi * t / (2.0 * tau_h));
  return p0 * s * s;
}

double echo_amplitude(double ca_p0, double reflectivity, double visible, double theta,
                      double range, double r1, double r2) noexcept {
  return ca_p0 * reflectivity * visible * overlap(range, r1, r2) / (theta * range * range);
}

double echo_lobe(const EchoTerm& term, double range) noexcept {
  if (range < term.start || range > term.end()) return 0.0;
  const double s = std::sin(std::numbers::pi * (range - term.start) / term.width);
  return term.amplitude * s * s;
}

double EchoProfile::operator()(double range) const noexcept {
  double sum = 0.0;
  for (const auto& t : terms) sum += echo_lobe(t, range);
  return sum;
}

std::pair<double, double> EchoProfile::support() const {
  if (terms.empty()) throw DomainError("empty echo profile");
  double lo = terms.front().start, hi = terms.front().end();
  for (const auto& t : terms) {
    lo = std::min(lo, t.start);
    hi = std::max(hi, t.end());
  }
  return {lo, hi};
}

namespace {

struct Cluster {
  double lo, hi;
  std::vector<EchoTerm> terms;
};

// Groups lobes with overlapping supports so the grid can skip empty gaps.
std::vector<Cluster> clusters_of(const EchoProfile& profile) {
  std::vector<EchoTerm> sorted = profile.terms;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const EchoTerm& a, const EchoTerm& b) { return a.start < b.start; });
  std::vector<Cluster> out;
  for (const auto& t : sorted) {
    if (out.empty() || t.start > out.back().hi) {
      out.push_back({t.start, t.end(), {t}});
    } else {
      out.back().hi = std::max(out.back().hi, t.end());
      out.back().terms.push_back(t);
    }
  }
  return out;
}

double sum_terms(const std::vector<EchoTerm>& terms, double r) noexcept {
  double s = 0.0;
  for (const auto& t : terms) s += echo_lobe(t, r);
  return s;
}

template <class Fn>
void for_each_grid_point(const EchoProfile& profile, double step, Fn&& fn) {
  const double origin = profile.support().first;
  for (const auto& c : clusters_of(profile)) {
    const auto k0 = static_cast<std::int64_t>(std::ceil((c.lo - origin) / step));
    const auto k1 = static_cast<std::int64_t>(std::floor((c.hi - origin) / step));
    for (std::int64_t k = k0; k <= k1; ++k) {
      const double r = origin + double(k) * step;
      fn(r, sum_terms(c.terms, r), c);
    }
  }
}

// Golden-section maximization of f on [a, b].
template <class Fn>
double golden_max(Fn&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace

EchoPeak max_peak(const EchoProfile& profile, double step) {
  if (profile.empty()) throw DomainError("max_peak on an empty echo profile");
  if (!(step > 0.0)) throw DomainError("peak grid step must be > 0");

  struct Sample {
    double r, p;
    const Cluster* cluster;
  };
  // Keep clusters alive for the refinement pass.
  const auto clusters = clusters_of(profile);
  const double origin = profile.support().first;
  std::vector<Sample> grid;
  double covered = 0.0;
  for (const auto& c : clusters) covered += c.hi - c.lo;
  grid.reserve(static_cast<std::size_t>(covered / step) + 2 * clusters.size() + 1);
  for (const auto& c : clusters) {
    const auto k0 = static_cast<std::int64_t>(std::ceil((c.lo - origin) / step));
    const auto k1 = static_cast<std::int64_t>(std::floor((c.hi - origin) / step));
    for (std::int64_t k = k0; k <= k1; ++k) {
      const double r = origin + double(k) * step;
      grid.push_back({r, sum_terms(c.terms, r), &c});
    }
  }
  if (grid.empty()) {
    // Support narrower than one step: the single lobe's own peak.
    const auto& c = clusters.front();
    grid.push_back({0.5 * (c.lo + c.hi), sum_terms(c.terms, 0.5 * (c.lo + c.hi)), &c});
  }

  double best_p = grid.front().p;
  for (const auto& s : grid) best_p = std::max(best_p, s.p);

  EchoPeak peak{-1.0, 0.0, 0.0};
  if (!(best_p > 0.0)) {
    peak.power = 0.0;
    peak.argmax = grid.front().r;
  } else {
    // Refine every local grid maximum close to the best one; a coarse grid
    // can rank two near-equal peaks in the wrong order.
    const double keep = best_p * (1.0 - 1e-2);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto& s = grid[k];
      if (s.p < keep) continue;
      if (k > 0 && grid[k - 1].cluster == s.cluster && grid[k - 1].p > s.p) continue;
      if (k + 1 < grid.size() && grid[k + 1].cluster == s.cluster && grid[k + 1].p > s.p) continue;
      const auto& terms = s.cluster->terms;
      const auto f = [&](double r) { return sum_terms(terms, r); };
      const double lo = std::max(s.cluster->lo, s.r - step);
      const double hi = std::min(s.cluster->hi, s.r + step);
      double r = golden_max(f, lo, hi, 0.1 * kPeakTolerance);
      double p = f(r);
      if (s.p > p) {
        r = s.r;
        p = s.p;
      }
      if (p > peak.power) {
        peak.power = p;
        peak.argmax = r;
      }
    }
  }
  peak.range = peak.argmax - 0.5 * profile.terms.front().width;
  return peak;
}

std::vector<std::pair<double, double>> sample_profile(const EchoProfile& profile, double step) {
  if (!(step > 0.0)) throw DomainError("profile grid step must be > 0");
  std::vector<std::pair<double, double>> out;
  if (profile.empty()) return out;
  for_each_grid_point(profile, step, [&](double r, double p, const Cluster&) { out.emplace_back(r, p); });
  return out;
}

void write_profile_csv(std::ostream& out, std::span<const std::pair<double, double>> samples) {
  out << "R,P\n" << std::setprecision(12);
  for (const auto& [r, p] : samples) out << r << ',' << p << '\n';
}

}  // namespace snowsim
