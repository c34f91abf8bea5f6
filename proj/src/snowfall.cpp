#include "snowsim/snowfall.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "snowsim/errors.hpp"
#include "snowsim/intensity_calibration.hpp"
#include "snowsim/random.hpp"

namespace snowsim {

const char* to_string(PointLabel label) noexcept {
  switch (label) {
    case PointLabel::Unchanged: return "unchanged";
    case PointLabel::Attenuated: return "attenuated";
    case PointLabel::Scattered: return "scattered";
    case PointLabel::Dropped: return "dropped";
  }
  return "?";
}

void AugmentationStats::count(PointLabel label) noexcept {
  switch (label) {
    case PointLabel::Unchanged: ++unchanged; break;
    case PointLabel::Attenuated: ++attenuated; break;
    case PointLabel::Scattered: ++scattered; break;
    case PointLabel::Dropped: ++dropped; break;
  }
}

void validate(const SnowfallConfig& cfg) {
  if (!(cfg.rate >= 0.0) || !std::isfinite(cfg.rate)) throw ConfigError("snowfall rate must be >= 0");
  if (!(cfg.snow_reflectivity > 0.0 && cfg.snow_reflectivity <= 1.0)) {
    throw ConfigError("snow reflectivity must lie in (0, 1]");
  }
  if (!(cfg.target_reflectivity > 0.0) || !std::isfinite(cfg.target_reflectivity)) {
    throw ConfigError("target reflectivity must be > 0");
  }
  if (!(cfg.grid_step >= 0.0) || !(cfg.bin_width >= 0.0)) {
    throw ConfigError("grid step and bin width must be >= 0");
  }
}

std::uint64_t layer_seed(std::uint64_t frame_seed, std::uint32_t layer) noexcept {
  return derive_seed(frame_seed, layer);
}

EchoProfile echo_profile(std::span<const BeamHit> hits, double target_power, double r0,
                         const LaserCalibration& laser, const SensorCalibration& calib,
                         const SnowfallConfig& cfg) {
  const double width = calib.pulse_length();
  const double theta = calib.theta();
  const double rho_0 = cfg.target_reflectivity;
  const double rho_s = cfg.snow_reflectivity;
  EchoProfile profile;
  profile.terms.reserve(hits.size());
  for (const auto& h : hits) {
    double amplitude = 0.0;
    if (h.kind == HitKind::Target) {
      const double ca_p0 = target_power / rho_0 * r0 * r0;
      amplitude = echo_amplitude(ca_p0, rho_0, h.theta, theta, r0, calib.r1(), calib.r2());
    } else {
      const double ca_p0 = rho_s * laser.max_intensity / rho_0;
      amplitude = echo_amplitude(ca_p0, rho_s, h.theta, theta, h.range, calib.r1(), calib.r2());
    }
    profile.terms.push_back({amplitude, h.range, width});
  }
  return profile;
}

double peak_grid_step(const SensorCalibration& calib, const SnowfallConfig& cfg) noexcept {
  return cfg.grid_step > 0.0 ? cfg.grid_step : calib.pulse_length() / 100.0;
}

BeamTrace trace_beam(const LidarPoint& point, const BeamIndex& index, const LaserCalibration& laser,
                     const SensorCalibration& calib, const SnowfallConfig& cfg) {
  BeamTrace trace;
  trace.output = point;
  const double r0 = point.range();
  const double theta = calib.theta();
  trace.hits = index.query(point.x, point.y, r0, theta);
  if (trace.hits.size() <= 1) return trace;

  const double r_max = calib.max_range();
  const auto inverted = invert_calibration_clamped(point.intensity, r0, r_max, laser);
  if (inverted.clamped) {
    trace.power_clamped = true;
    return trace;
  }

  trace.profile = echo_profile(trace.hits, inverted.power, r0, laser, calib, cfg);
  const double width = calib.pulse_length();
  const double step = peak_grid_step(calib, cfg);
  trace.peak = max_peak(trace.profile, step);
  double power = trace.peak.power;
  double r_star = trace.peak.range;
  if (!(power > 0.0)) {
    // Nothing reflects into the receiver; keep the geometry.
    trace.no_echo = true;
    power = 0.0;
    r_star = r0;
  }

  const double intensity = apply_calibration_scaled(power, r_star, r_max, laser);
  const double scale = r_star / r0;
  trace.output.x = static_cast<float>(point.x * scale);
  trace.output.y = static_cast<float>(point.y * scale);
  trace.output.z = static_cast<float>(point.z * scale);
  trace.output.intensity = static_cast<float>(intensity);

  if (std::abs(r_star - r0) > 0.5 * width) {
    trace.label = PointLabel::Scattered;
  } else if (trace.output.intensity < point.intensity) {
    trace.label = PointLabel::Attenuated;
  }
  return trace;
}

namespace {

AugmentationResult run_snow(const PointCloud& pc, const SensorCalibration& calib,
                            const SnowfallConfig& cfg, const FieldProvider& field_for) {
  AugmentationResult result;
  result.cloud = pc;
  result.labels.assign(pc.size(), PointLabel::Unchanged);
  result.stats.particles_per_layer.assign(calib.layer_count(), 0);

  const auto n_layers = calib.layer_count();
  for (std::size_t k = 0; k < pc.size(); ++k) {
    auto& p = result.cloud.points[k];
    if (p.layer && *p.layer >= n_layers) {
      throw ConfigError("point " + std::to_string(k) + " has layer " + std::to_string(*p.layer) +
                        " missing from calibration (" + std::to_string(n_layers) + " lasers)");
    }
  }
  if (!pc.has_layers()) {
    result.cloud = assign_layers(std::move(result.cloud), calib);
  }

  std::vector<std::vector<std::size_t>> by_layer(n_layers);
  for (std::size_t k = 0; k < pc.size(); ++k) by_layer[*result.cloud.points[k].layer].push_back(k);
  std::vector<std::uint32_t> work;
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    if (!by_layer[l].empty()) work.push_back(l);
  }

  const double bin_width = cfg.bin_width > 0.0 ? cfg.bin_width : calib.theta();
  std::vector<AugmentationStats> layer_stats(n_layers);
  std::vector<std::size_t> particle_counts(n_layers, 0);

  auto process_layer = [&](std::uint32_t l) {
    const ParticleField& field = field_for(l);
    const BeamIndex index(field, bin_width);
    const auto& laser = calib.laser(l);
    auto& st = layer_stats[l];
    particle_counts[l] = field.particles.size();
    for (const auto k : by_layer[l]) {
      const auto trace = trace_beam(pc.points[k], index, laser, calib, cfg);
      auto& out = result.cloud.points[k];
      out.x = trace.output.x;
      out.y = trace.output.y;
      out.z = trace.output.z;
      out.intensity = trace.output.intensity;
      result.labels[k] = trace.label;
      st.power_clamped += trace.power_clamped;
      st.no_echo += trace.no_echo;
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, unsigned(work.size())));
  if (threads <= 1) {
    for (const auto l : work) process_layer(l);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t w = next++; w < work.size(); w = next++) {
          try {
            process_layer(work[w]);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  for (const auto l : work) {
    const auto& st = layer_stats[l];
    result.stats.power_clamped += st.power_clamped;
    result.stats.no_echo += st.no_echo;
  }
  result.stats.particles_per_layer = std::move(particle_counts);
  for (const auto label : result.labels) result.stats.count(label);
  return result;
}

}  // namespace

AugmentationResult augment_snow(const PointCloud& pc, const SensorCalibration& calib,
                                const SnowfallConfig& cfg) {
  validate(cfg);
  if (cfg.rate == 0.0) {
    AugmentationResult result;
    result.cloud = pc;
    result.labels.assign(pc.size(), PointLabel::Unchanged);
    result.stats.particles_per_layer.assign(calib.layer_count(), 0);
    result.stats.unchanged = pc.size();
    return result;
  }
  // Fields are sampled lazily, one per layer that has points.
  std::vector<std::optional<ParticleField>> fields(calib.layer_count());
  const FieldProvider sample = [&](std::uint32_t l) -> const ParticleField& {
    fields[l] = sample_field(calib.max_range(), cfg.rate, layer_seed(cfg.seed, l), cfg.snow);
    return *fields[l];
  };
  return run_snow(pc, calib, cfg, sample);
}

AugmentationResult augment_snow(const PointCloud& pc, const SensorCalibration& calib,
                                const SnowfallConfig& cfg, const FieldProvider& field_for) {
  validate(cfg);
  return run_snow(pc, calib, cfg, field_for);
}

}  // namespace snowsim
