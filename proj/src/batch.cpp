#include "snowsim/batch.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "snowsim/errors.hpp"
#include "snowsim/intensity_calibration.hpp"
#include "snowsim/random.hpp"

namespace fs = std::filesystem;

namespace snowsim {

AugmentMode parse_mode(const std::string& text) {
  if (text == "snow") return AugmentMode::Snow;
  if (text == "wet") return AugmentMode::Wet;
  if (text == "snow+wet") return AugmentMode::SnowWet;
  throw ConfigError("unknown mode '" + text + "' (expected snow, wet or snow+wet)");
}

const char* to_string(AugmentMode mode) noexcept {
  switch (mode) {
    case AugmentMode::Snow: return "snow";
    case AugmentMode::Wet: return "wet";
    case AugmentMode::SnowWet: return "snow+wet";
  }
  return "?";
}

void validate(const RunConfig& cfg) {
  if (!(cfg.p_aug >= 0.0 && cfg.p_aug <= 1.0)) throw ConfigError("p_aug must lie in [0, 1]");
  if (cfg.rates.empty()) throw ConfigError("snowfall rate grid is empty");
  for (double r : cfg.rates) {
    if (!(r >= 0.0 && r <= 10.0)) throw ConfigError("snowfall rates must lie in [0, 10] mm/h");
  }
  if (!(cfg.dw_mean > 0.0 && cfg.dw_min >= 0.0 && cfg.dw_max > cfg.dw_min)) {
    throw ConfigError("water depth sampler needs mean > 0 and 0 <= min < max");
  }
  if (cfg.workers == 0) throw ConfigError("worker count must be >= 1");
  if (!fs::is_directory(cfg.input)) throw ConfigError("input directory " + cfg.input.string() + " does not exist");
  if (cfg.output.empty()) throw ConfigError("no output directory given");
  if (fs::exists(cfg.output) && fs::equivalent(cfg.input, cfg.output)) {
    throw ConfigError("output directory must differ from input directory");
  }
  validate(cfg.snow);
}

bool is_selected(std::size_t index, double p_aug) noexcept {
  if (!(p_aug > 0.0)) return false;
  const auto stride = static_cast<std::size_t>(std::ceil(1.0 / p_aug - 1e-9));
  return (index + 1) % std::max<std::size_t>(stride, 1) == 0;
}

std::uint64_t frame_seed(std::uint64_t master, std::size_t index) noexcept {
  return derive_seed(master, index);
}

std::vector<fs::path> list_frames(const fs::path& dir, const std::string& extension) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == extension) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

PointCloud augment_frame(const PointCloud& pc, const SensorCalibration& calib, const RunConfig& cfg,
                         std::size_t index, FrameReport& report) {
  const std::uint64_t seed = frame_seed(cfg.seed, index);
  const bool snow = cfg.mode != AugmentMode::Wet;
  const bool wet = cfg.mode != AugmentMode::Snow;

  PointCloud cloud = assign_layers(pc, calib);
  report.input_points = pc.size();

  if (snow) {
    Rng rng(derive_seed(seed, 0));
    SnowfallConfig scfg = cfg.snow;
    scfg.rate = cfg.rates[rng.below(cfg.rates.size())];
    scfg.seed = derive_seed(seed, 1);
    report.rate = scfg.rate;
    auto res = augment_snow(cloud, calib, scfg);
    report.snow = std::move(res.stats);
    cloud = std::move(res.cloud);
  }

  if (wet) {
    Rng rng(derive_seed(seed, 2));
    WetParams params = cfg.wet;
    params.water_depth = sample_water_depth(rng, cfg.dw_mean, cfg.dw_min, cfg.dw_max);
    report.water_depth = params.water_depth;

    // Ground geometry and radiometry come from the clear input.
    RansacConfig rcfg = cfg.ransac;
    rcfg.seed = derive_seed(seed, 3);
    const GroundPlane plane = fit_ground_plane(pc, rcfg);
    report.plane = plane;
    PowerNoiseModels models{cfg.fallback_power, cfg.fallback_noise};
    try {
      const auto samples = ground_samples(pc, plane);
      models = estimate_power_and_noise(samples);
    } catch (const EstimationError&) {
      report.models_fallback = true;
    }
    report.models = models;
    auto res = augment_wet(cloud, plane, params, models.power, models.noise_floor);
    report.wet = std::move(res.stats);
    cloud = std::move(res.cloud);
  }
  cloud.frame_id = pc.frame_id;
  report.output_points = cloud.size();
  return cloud;
}

BatchSummary run_batch(const RunConfig& cfg) {
  validate(cfg);
  const SensorCalibration calib = read_calibration(cfg.calibration);
  const auto frames = list_frames(cfg.input, cfg.extension);
  fs::create_directories(cfg.output);

  BatchSummary summary;
  summary.frames.resize(frames.size());

  auto process = [&](std::size_t k) {
    auto& rep = summary.frames[k];
    rep.index = k;
    rep.name = frames[k].filename().string();
    rep.selected = is_selected(k, cfg.p_aug);
    const auto start = std::chrono::steady_clock::now();
    try {
      const fs::path dest = cfg.output / frames[k].filename();
      if (!rep.selected) {
        write_file_atomic(dest, read_file_bytes(frames[k]));
      } else {
        const PointCloud pc = read_sweep(frames[k], cfg.layout);
        const PointCloud out = augment_frame(pc, calib, cfg, k, rep);
        write_sweep(out, dest, cfg.layout);
      }
    } catch (const std::exception& e) {
      rep.ok = false;
      rep.error = e.what();
    }
    rep.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, unsigned(frames.size())));
  if (workers == 1) {
    for (std::size_t k = 0; k < frames.size(); ++k) process(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < frames.size(); k = next++) process(k);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (const auto& f : summary.frames) {
    summary.selected += f.selected;
    summary.failed += !f.ok;
  }

  const fs::path stats = cfg.stats_out.empty() ? cfg.output / "report.jsonl" : cfg.stats_out;
  const std::string text = report_jsonl(summary, cfg.timing);
  write_file_atomic(stats, std::as_bytes(std::span(text.data(), text.size())));
  return summary;
}

std::vector<FrameClassification> classify_directory(const fs::path& dir, const DrorConfig& cfg,
                                                    const DetectionBox& box, SweepLayout layout,
                                                    const std::string& extension) {
  std::vector<FrameClassification> out;
  for (const auto& f : list_frames(dir, extension)) {
    out.push_back({f.filename().string(), classify_snowfall(read_sweep(f, layout), cfg, box)});
  }
  return out;
}

std::vector<std::pair<double, double>> dump_profile(const PointCloud& pc, std::size_t point_index,
                                                    const SensorCalibration& calib,
                                                    const SnowfallConfig& cfg) {
  validate(cfg);
  if (point_index >= pc.size()) {
    throw LookupError("point " + std::to_string(point_index) + " not in frame of " +
                      std::to_string(pc.size()) + " points");
  }
  LidarPoint p = pc.points[point_index];
  if (!p.layer || *p.layer >= calib.layer_count()) {
    p.layer = nearest_layer(p.elevation(), calib.elevation_angles());
  }
  const auto& laser = calib.laser(*p.layer);
  const ParticleField field =
      sample_field(calib.max_range(), cfg.rate, layer_seed(cfg.seed, *p.layer), cfg.snow);
  const BeamIndex index(field, cfg.bin_width > 0.0 ? cfg.bin_width : calib.theta());
  const double r0 = p.range();
  const auto hits = index.query(p.x, p.y, r0, calib.theta());
  const auto power = invert_calibration_clamped(p.intensity, r0, calib.max_range(), laser).power;
  const auto profile = echo_profile(hits, power, r0, laser, calib, cfg);
  return sample_profile(profile, peak_grid_step(calib, cfg));
}

}  // namespace snowsim
