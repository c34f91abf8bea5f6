#include "snowsim/sensor_calibration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "snowsim/errors.hpp"

namespace snowsim {
namespace {

constexpr const char* kMagic = "snowsim-calibration";
constexpr int kVersion = 1;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& text, int line_no) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw FormatError("calibration line " + std::to_string(line_no) + ": bad number '" + text + "'");
  }
  return v;
}

}  // namespace

SensorCalibration::SensorCalibration(Globals globals, std::vector<LaserCalibration> lasers)
    : globals_(globals), lasers_(std::move(lasers)) {
  const auto& g = globals_;
  if (!(g.pulse_half_power_width > 0.0)) throw ConfigError("tau_h must be > 0");
  if (!(g.beam_divergence > 0.0)) throw ConfigError("theta must be > 0");
  if (!(g.overlap_start >= 0.0 && g.overlap_start < g.overlap_full && g.overlap_full <= g.max_range)) {
    throw ConfigError("overlap bounds must satisfy 0 <= r1 < r2 <= r_max");
  }
  if (lasers_.empty()) throw ConfigError("calibration has no lasers");
  for (std::size_t k = 0; k < lasers_.size(); ++k) {
    const auto& l = lasers_[k];
    if (!(l.max_intensity > 0.0)) {
      throw ConfigError("laser " + std::to_string(k) + ": max_intensity must be > 0");
    }
    if (!std::isfinite(l.focal_slope) || !std::isfinite(l.focal_offset()) ||
        !std::isfinite(l.elevation)) {
      throw ConfigError("laser " + std::to_string(k) + ": non-finite constant");
    }
    if (k > 0 && !(lasers_[k - 1].elevation < l.elevation)) {
      throw ConfigError("laser elevations must be strictly ascending (laser " + std::to_string(k) + ")");
    }
  }
}

const LaserCalibration& SensorCalibration::laser(std::uint32_t layer) const {
  if (layer >= lasers_.size()) {
    throw ConfigError("layer " + std::to_string(layer) + " missing from calibration (" +
                      std::to_string(lasers_.size()) + " lasers)");
  }
  return lasers_[layer];
}

std::vector<double> SensorCalibration::elevation_angles() const {
  std::vector<double> out;
  out.reserve(lasers_.size());
  for (const auto& l : lasers_) out.push_back(l.elevation);
  return out;
}

SensorCalibration SensorCalibration::uniform(std::uint32_t n_lasers, double lowest, double highest,
                                             double max_intensity, Globals globals) {
  std::vector<LaserCalibration> lasers(n_lasers);
  for (std::uint32_t k = 0; k < n_lasers; ++k) {
    const double t = n_lasers > 1 ? double(k) / double(n_lasers - 1) : 0.0;
    lasers[k].elevation = lowest + t * (highest - lowest);
    lasers[k].max_intensity = max_intensity;
    lasers[k].focal_distance = 1.0;  // f_o = 0
  }
  return SensorCalibration(globals, std::move(lasers));
}

SensorCalibration parse_calibration(std::istream& in) {
  SensorCalibration::Globals g;
  std::vector<LaserCalibration> lasers;
  std::optional<std::size_t> declared;
  std::string raw;
  int line_no = 0;
  bool seen_magic = false;

  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;

    if (!seen_magic) {
      std::istringstream ls(line);
      std::string magic;
      int version = 0;
      if (!(ls >> magic >> version) || magic != kMagic) {
        throw FormatError("calibration must start with '" + std::string(kMagic) + " " +
                          std::to_string(kVersion) + "'");
      }
      if (version != kVersion) {
        throw FormatError("unsupported calibration version " + std::to_string(version));
      }
      seen_magic = true;
      continue;
    }

    if (line.rfind("laser", 0) == 0 && line.find('=') == std::string::npos) {
      const std::string idx = trim(line.substr(5));
      const double v = parse_number(idx, line_no);
      if (v != double(lasers.size())) {
        throw FormatError("calibration line " + std::to_string(line_no) + ": expected laser " +
                          std::to_string(lasers.size()));
      }
      lasers.emplace_back();
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("calibration line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const double v = parse_number(trim(line.substr(eq + 1)), line_no);

    if (lasers.empty()) {
      if (key == "tau_h") g.pulse_half_power_width = v;
      else if (key == "r_max") g.max_range = v;
      else if (key == "theta") g.beam_divergence = v;
      else if (key == "r1") g.overlap_start = v;
      else if (key == "r2") g.overlap_full = v;
      else if (key == "lasers") declared = static_cast<std::size_t>(v);
      else throw FormatError("calibration line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    } else {
      auto& l = lasers.back();
      if (key == "elevation") l.elevation = v;
      else if (key == "focal_slope") l.focal_slope = v;
      else if (key == "focal_distance") l.focal_distance = v;
      else if (key == "max_intensity") l.max_intensity = v;
      else throw FormatError("calibration line " + std::to_string(line_no) + ": unknown laser key '" + key + "'");
    }
  }
  if (!seen_magic) throw FormatError("empty calibration");
  if (declared && *declared != lasers.size()) {
    throw FormatError("calibration declares " + std::to_string(*declared) + " lasers but defines " +
                      std::to_string(lasers.size()));
  }
  return SensorCalibration(g, std::move(lasers));
}

SensorCalibration read_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open calibration " + path.string());
  return parse_calibration(in);
}

void write_calibration(std::ostream& out, const SensorCalibration& calib) {
  const auto& g = calib.globals();
  out << kMagic << ' ' << kVersion << '\n' << std::setprecision(17);
  out << "tau_h = " << g.pulse_half_power_width << '\n'
      << "r_max = " << g.max_range << '\n'
      << "theta = " << g.beam_divergence << '\n'
      << "r1 = " << g.overlap_start << '\n'
      << "r2 = " << g.overlap_full << '\n'
      << "lasers = " << calib.layer_count() << '\n';
  for (std::uint32_t k = 0; k < calib.layer_count(); ++k) {
    const auto& l = calib.laser(k);
    out << "\nlaser " << k << '\n'
        << "elevation = " << l.elevation << '\n'
        << "focal_slope = " << l.focal_slope << '\n'
        << "focal_distance = " << l.focal_distance << '\n'
        << "max_intensity = " << l.max_intensity << '\n';
  }
}

void write_calibration(const std::filesystem::path& path, const SensorCalibration& calib) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_calibration(out, calib);
  if (!out) throw IoError("write failed for " + path.string());
}

std::uint32_t nearest_layer(double elevation, std::span<const double> angles) noexcept {
  const auto it = std::lower_bound(angles.begin(), angles.end(), elevation);
  if (it == angles.begin()) return 0;
  if (it == angles.end()) return static_cast<std::uint32_t>(angles.size() - 1);
  const auto hi = static_cast<std::uint32_t>(it - angles.begin());
  const double d_lo = elevation - angles[hi - 1];
  const double d_hi = angles[hi] - elevation;
  return d_hi < d_lo ? hi : hi - 1;
}

PointCloud assign_layers(PointCloud pc, const SensorCalibration& calib) {
  const auto angles = calib.elevation_angles();
  const auto n = calib.layer_count();
  for (auto& p : pc.points) {
    if (p.layer && *p.layer < n) continue;
    p.layer = nearest_layer(p.elevation(), angles);
  }
  return pc;
}

}  // namespace snowsim
