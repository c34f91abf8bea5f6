#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "snowsim/augmentation.hpp"
#include "snowsim/dror.hpp"
#include "snowsim/range_model.hpp"
#include "snowsim/sensor_calibration.hpp"
#include "snowsim/snowfall.hpp"
#include "snowsim/sweep_io.hpp"
#include "snowsim/wet_ground.hpp"

namespace snowsim {

enum class AugmentMode { Snow, Wet, SnowWet };

AugmentMode parse_mode(const std::string& text);
const char* to_string(AugmentMode mode) noexcept;

struct RunConfig {
  AugmentMode mode = AugmentMode::Snow;
  std::filesystem::path input;        // directory of sweep files
  std::filesystem::path output;       // created if missing
  std::filesystem::path calibration;
  /// Fraction of frames to augment; every ceil(1/p)-th frame is selected.
  double p_aug = 0.1;
  std::vector<double> rates{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};  // mm/h
  double dw_mean = 0.4;  // mm
  double dw_min = 0.1;   // mm
  double dw_max = 1.2;   // mm
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// JSON-lines report; defaults to <output>/report.jsonl.
  std::filesystem::path stats_out;
  /// Include wall-clock timings in the report (the only non-deterministic field).
  bool timing = true;
  SweepLayout layout = SweepLayout::XYZI;
  std::string extension = ".bin";

  SnowfallConfig snow;  // rate and seed are set per frame
  WetParams wet;        // water depth is set per frame
  RansacConfig ransac;  // seed is set per frame
  /// Used when the ground returns do not support a fit.
  LinearRangeModel fallback_power{0.0, 1.0, 0.0, 0.0};
  LinearRangeModel fallback_noise{0.0, 0.0, 0.0, 0.0};
};

/// Validates ranges and existence of the input paths; throws ConfigError.
void validate(const RunConfig& cfg);

/// Deterministic stride selection: frame `index` (0-based) is augmented iff
/// (index + 1) is a multiple of ceil(1 / p_aug). p_aug = 0 selects nothing.
bool is_selected(std::size_t index, double p_aug) noexcept;

std::uint64_t frame_seed(std::uint64_t master, std::size_t index) noexcept;

struct FrameReport {
  std::size_t index = 0;
  std::string name;
  bool selected = false;
  bool ok = true;
  std::string error;
  std::optional<double> rate;         // mm/h, snow modes
  std::optional<double> water_depth;  // mm, wet modes
  std::size_t input_points = 0;
  std::size_t output_points = 0;
  AugmentationStats snow;
  AugmentationStats wet;
  std::optional<GroundPlane> plane;
  std::optional<PowerNoiseModels> models;
  bool models_fallback = false;
  double runtime_ms = 0.0;
};

struct BatchSummary {
  std::vector<FrameReport> frames;
  std::size_t selected = 0;
  std::size_t failed = 0;

  int exit_code() const noexcept { return failed > 0 ? 1 : 0; }
};

/// Sweep files of a directory with the configured extension, sorted by name.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir,
                                               const std::string& extension = ".bin");

/// Augments one decoded frame; used by run_batch and usable in-process.
/// `report` receives the per-frame statistics.
PointCloud augment_frame(const PointCloud& pc, const SensorCalibration& calib, const RunConfig& cfg,
                         std::size_t index, FrameReport& report);

/// Processes every frame of cfg.input into cfg.output and writes the report.
/// Unselected frames are copied byte for byte. Frame failures are recorded
/// and do not stop the batch.
BatchSummary run_batch(const RunConfig& cfg);

struct FrameClassification {
  std::string name;
  SnowfallClassification result;
};

std::vector<FrameClassification> classify_directory(const std::filesystem::path& dir,
                                                    const DrorConfig& cfg = {},
                                                    const DetectionBox& box = {},
                                                    SweepLayout layout = SweepLayout::XYZI,
                                                    const std::string& extension = ".bin");

/// Superposed echo profile of point `point_index` of `pc` at the given
/// snowfall configuration, sampled on the peak-search grid. Throws
/// LookupError if the point does not exist.
std::vector<std::pair<double, double>> dump_profile(const PointCloud& pc, std::size_t point_index,
                                                    const SensorCalibration& calib,
                                                    const SnowfallConfig& cfg);

/// JSON-lines encoding: one object per frame, then {"summary": ...}.
std::string report_jsonl(const BatchSummary& summary, bool timing);

}  // namespace snowsim
