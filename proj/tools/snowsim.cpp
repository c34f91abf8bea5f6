// Command-line front end: batch snowfall / wet-ground augmentation, DROR
// snowfall classification and echo-profile dumps.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "snowsim/batch.hpp"
#include "snowsim/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw snowsim::ConfigError("bad number '" + item + "' in list '" + text + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiDAR snowfall and wet-ground augmentation"};

  std::string mode = "snow";
  std::string input, output, calib, rates = "0,0.5,1.0,1.5,2.0,2.5", dw_range = "0.1,1.2";
  std::string stats_out, layout = "xyzi", init_calib;
  double p_aug = 0.1, dw_mean = 0.4;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  long long dump_point = -1;
  bool classify = false, no_timing = false;
  unsigned init_lasers = 64;
  snowsim::DrorConfig dror;

  app.add_option("--mode", mode, "snow, wet or snow+wet")->capture_default_str();
  app.add_option("--input", input, "Input directory of sweeps (a single sweep file with --dump-profile)");
  app.add_option("--output", output, "Output directory (CSV file with --dump-profile)");
  app.add_option("--calib", calib, "Sensor calibration file");
  app.add_option("--p-aug", p_aug, "Fraction of frames to augment (every ceil(1/p)-th frame)")
      ->capture_default_str();
  app.add_option("--rates", rates, "Comma-separated snowfall-rate grid, mm/h")->capture_default_str();
  app.add_option("--dw-mean", dw_mean, "Mean of the water-depth distribution, mm")->capture_default_str();
  app.add_option("--dw-range", dw_range, "Water-depth truncation 'min,max', mm")->capture_default_str();
  app.add_option("--seed", seed, "Master seed")->capture_default_str();
  app.add_option("--workers", workers, "Frame-level worker threads")->capture_default_str();
  app.add_option("--dump-profile", dump_point,
                 "Write the echo profile (R,P) of this point index of the --input sweep, using the "
                 "first --rates value");
  app.add_flag("--classify", classify, "Classify every frame of --input as clear/light/heavy snowfall");
  app.add_option("--stats-out", stats_out, "Report path (JSON lines; table with --classify)");
  app.add_option("--layout", layout, "Sweep record layout: xyzi or xyzil")->capture_default_str();
  app.add_flag("--no-timing", no_timing, "Omit wall-clock timings from the report");
  app.add_option("--dror-alpha", dror.angular_resolution, "DROR horizontal angular resolution, rad")
      ->capture_default_str();
  app.add_option("--dror-beta", dror.radius_multiplier, "DROR radius multiplier")->capture_default_str();
  app.add_option("--dror-kmin", dror.min_neighbors, "DROR minimum neighbor count")->capture_default_str();
  app.add_option("--dror-rmin", dror.min_radius, "DROR minimum search radius, m")->capture_default_str();
  app.add_option("--init-calib", init_calib, "Write a default calibration file and exit");
  app.add_option("--init-lasers", init_lasers, "Laser count for --init-calib")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const auto sweep_layout = layout == "xyzi"    ? snowsim::SweepLayout::XYZI
                              : layout == "xyzil" ? snowsim::SweepLayout::XYZI_Layer
                                                  : throw snowsim::ConfigError("unknown layout " + layout);

    if (!init_calib.empty()) {
      // HDL-64-like vertical field of view.
      constexpr double kDeg = 3.14159265358979323846 / 180.0;
      const auto c = snowsim::SensorCalibration::uniform(init_lasers, -24.9 * kDeg, 2.0 * kDeg);
      snowsim::write_calibration(init_calib, c);
      return kExitOk;
    }

    if (classify) {
      if (input.empty()) throw snowsim::ConfigError("--classify needs --input");
      snowsim::validate(dror);
      const auto rows = snowsim::classify_directory(input, dror, {}, sweep_layout);
      std::ofstream file;
      if (!stats_out.empty()) {
        file.open(stats_out);
        if (!file) throw snowsim::IoError("cannot open " + stats_out);
      }
      std::ostream& out = stats_out.empty() ? std::cout : file;
      out << "frame\tclass\tremoved_in_box\n";
      for (const auto& r : rows) {
        out << r.name << '\t' << snowsim::to_string(r.result.level) << '\t' << r.result.removed_in_box
            << '\n';
      }
      return kExitOk;
    }

    if (calib.empty()) throw snowsim::ConfigError("--calib is required");
    const auto calibration = snowsim::read_calibration(calib);

    if (dump_point >= 0) {
      if (input.empty()) throw snowsim::ConfigError("--dump-profile needs --input <sweep file>");
      snowsim::SnowfallConfig scfg;
      scfg.rate = parse_list(rates).at(0);
      scfg.seed = seed;
      const auto pc = snowsim::read_sweep(input, sweep_layout);
      const auto samples = snowsim::dump_profile(pc, std::size_t(dump_point), calibration, scfg);
      if (output.empty()) {
        snowsim::write_profile_csv(std::cout, samples);
      } else {
        std::ofstream file(output);
        if (!file) throw snowsim::IoError("cannot open " + output);
        snowsim::write_profile_csv(file, samples);
      }
      return kExitOk;
    }

    snowsim::RunConfig cfg;
    cfg.mode = snowsim::parse_mode(mode);
    cfg.input = input;
    cfg.output = output;
    cfg.calibration = calib;
    cfg.p_aug = p_aug;
    cfg.rates = parse_list(rates);
    cfg.dw_mean = dw_mean;
    const auto range = parse_list(dw_range);
    if (range.size() != 2) throw snowsim::ConfigError("--dw-range expects 'min,max'");
    cfg.dw_min = range[0];
    cfg.dw_max = range[1];
    cfg.seed = seed;
    cfg.workers = workers;
    cfg.stats_out = stats_out;
    cfg.timing = !no_timing;
    cfg.layout = sweep_layout;

    const auto summary = snowsim::run_batch(cfg);
    std::cerr << summary.frames.size() << " frames, " << summary.selected << " augmented, "
              << summary.failed << " failed\n";
    for (const auto& f : summary.frames) {
      if (!f.ok) std::cerr << "  " << f.name << ": " << f.error << '\n';
    }
    return summary.exit_code() == 0 ? kExitOk : kExitPartial;
  } catch (const snowsim::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const snowsim::FormatError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPartial;
  }
}
