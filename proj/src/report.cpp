#include <json.hpp>

#include "snowsim/batch.hpp"

namespace snowsim {
namespace {

using nlohmann::ordered_json;

ordered_json to_json(const AugmentationStats& s) {
  ordered_json j;
  j["unchanged"] = s.unchanged;
  j["attenuated"] = s.attenuated;
  j["scattered"] = s.scattered;
  j["dropped"] = s.dropped;
  j["power_clamped"] = s.power_clamped;
  j["reflectivity_clamped"] = s.reflectivity_clamped;
  j["no_echo"] = s.no_echo;
  std::size_t particles = 0;
  for (auto c : s.particles_per_layer) particles += c;
  j["particles"] = particles;
  j["particles_per_layer"] = s.particles_per_layer;
  return j;
}

ordered_json to_json(const LinearRangeModel& m) {
  return {{"slope", m.slope}, {"intercept", m.intercept}, {"range_min", m.range_min},
          {"range_max", m.range_max}};
}

void accumulate(AugmentationStats& into, const AugmentationStats& s) {
  into.unchanged += s.unchanged;
  into.attenuated += s.attenuated;
  into.scattered += s.scattered;
  into.dropped += s.dropped;
  into.power_clamped += s.power_clamped;
  into.reflectivity_clamped += s.reflectivity_clamped;
  into.no_echo += s.no_echo;
}

}  // namespace

std::string report_jsonl(const BatchSummary& summary, bool timing) {
  std::string out;
  AugmentationStats snow_total, wet_total;
  std::size_t particles = 0;
  double runtime = 0.0;
  for (const auto& f : summary.frames) {
    ordered_json j;
    j["frame"] = f.index;
    j["name"] = f.name;
    j["selected"] = f.selected;
    j["status"] = f.ok ? (f.selected ? "augmented" : "copied") : "failed";
    if (!f.ok) j["error"] = f.error;
    if (f.selected && f.ok) {
      j["input_points"] = f.input_points;
      j["output_points"] = f.output_points;
      if (f.rate) {
        j["rate_mm_h"] = *f.rate;
        j["snow"] = to_json(f.snow);
      }
      if (f.water_depth) {
        j["water_depth_mm"] = *f.water_depth;
        j["wet"] = to_json(f.wet);
      }
      if (f.plane) {
        j["ground_plane"] = {{"normal", {f.plane->normal.x(), f.plane->normal.y(), f.plane->normal.z()}},
                             {"intercept", f.plane->intercept}};
      }
      if (f.models) {
        j["power_model"] = to_json(f.models->power);
        j["noise_model"] = to_json(f.models->noise_floor);
        j["models_fallback"] = f.models_fallback;
      }
    }
    if (timing) j["runtime_ms"] = f.runtime_ms;
    out += j.dump() + '\n';

    accumulate(snow_total, f.snow);
    accumulate(wet_total, f.wet);
    for (auto c : f.snow.particles_per_layer) particles += c;
    runtime += f.runtime_ms;
  }
  ordered_json s;
  s["frames"] = summary.frames.size();
  s["selected"] = summary.selected;
  s["failed"] = summary.failed;
  s["snow"] = to_json(snow_total);
  s["snow"]["particles"] = particles;
  s["snow"].erase("particles_per_layer");
  s["wet"] = to_json(wet_total);
  s["wet"].erase("particles_per_layer");
  s["wet"].erase("particles");
  if (timing) s["runtime_ms"] = runtime;
  out += ordered_json{{"summary", s}}.dump() + '\n';
  return out;
}

}  // namespace snowsim
