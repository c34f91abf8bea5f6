#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace snowsim {

/// Transmitter/receiver overlap: 0 up to r1, linear ramp, 1 from r2 on.
double overlap(double range, double r1, double r2) noexcept;

/// Transmitted pulse P0 * sin^2(pi t / (2 tau_H)) on [0, 2 tau_H], else 0.
double pulse_power(double t, double p0, double tau_h) noexcept;

/// One sin^2 echo of spatial width c * tau_H starting at the reflector range.
struct EchoTerm {
  double amplitude = 0.0;  // power units
  double start = 0.0;      // m
  double width = 0.0;      // m, c * tau_H

  double end() const noexcept { return start + width; }
};

/// Amplitude of the echo of a reflector at `range` that sees `visible` of the
/// beam opening `theta`: ca_p0 * rho * visible * xi(range) / (theta * range^2).
double echo_amplitude(double ca_p0, double reflectivity, double visible, double theta,
                      double range, double r1, double r2) noexcept;

/// amplitude * sin^2(pi (R - start) / width) inside [start, start + width].
double echo_lobe(const EchoTerm& term, double range) noexcept;

struct EchoProfile {
  std::vector<EchoTerm> terms;

  /// Superposition of all lobes at `range`.
  double operator()(double range) const noexcept;
  bool empty() const noexcept { return terms.empty(); }
  /// Lowest lobe start and highest lobe end.
  std::pair<double, double> support() const;
};

struct EchoPeak {
  double power = 0.0;   // superposed power at the peak
  double argmax = 0.0;  // m, location of the peak
  double range = 0.0;   // m, argmax - width / 2 (range of the reflector)
};

inline constexpr double kPeakTolerance = 1e-4;  // m

/// Strongest echo. The profile is sampled on a grid of step `grid_step`
/// anchored at the lowest lobe start (gaps between disjoint lobes are
/// skipped); the best grid maxima are refined by golden-section search to
/// kPeakTolerance. Throws DomainError for an empty profile or a non-positive
/// step.
EchoPeak max_peak(const EchoProfile& profile, double grid_step);

/// The same grid max_peak samples, as (R, P) pairs in ascending R.
std::vector<std::pair<double, double>> sample_profile(const EchoProfile& profile, double grid_step);

/// CSV with header "R,P".
void write_profile_csv(std::ostream& out, std::span<const std::pair<double, double>> samples);

}  // namespace snowsim
