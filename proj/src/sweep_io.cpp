#include "snowsim/sweep_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <system_error>

#include "snowsim/errors.hpp"

namespace snowsim {
namespace {

float load_f32(const std::byte* p) noexcept {
  const std::uint32_t bits = std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
                             (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

void store_f32(std::byte* p, float v) noexcept {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  p[0] = std::byte(bits & 0xff);
  p[1] = std::byte((bits >> 8) & 0xff);
  p[2] = std::byte((bits >> 16) & 0xff);
  p[3] = std::byte((bits >> 24) & 0xff);
}

std::string describe(const std::vector<std::size_t>& bad) {
  std::ostringstream os;
  os << bad.size() << " invalid record(s) at index";
  const std::size_t shown = std::min<std::size_t>(bad.size(), 16);
  for (std::size_t k = 0; k < shown; ++k) os << (k ? ", " : " ") << bad[k];
  if (shown < bad.size()) os << ", ...";
  return os.str();
}

}  // namespace

PointCloud decode_sweep(std::span<const std::byte> bytes, SweepLayout layout) {
  const std::size_t rec = record_size(layout);
  if (bytes.size() % rec != 0) {
    throw FormatError("sweep payload of " + std::to_string(bytes.size()) +
                      " bytes is not a multiple of the " + std::to_string(rec) + "-byte record");
  }
  const std::size_t n = bytes.size() / rec;
  PointCloud pc;
  pc.points.resize(n);
  std::vector<std::size_t> bad;
  for (std::size_t k = 0; k < n; ++k) {
    const std::byte* p = bytes.data() + k * rec;
    LidarPoint& pt = pc.points[k];
    pt.x = load_f32(p);
    pt.y = load_f32(p + 4);
    pt.z = load_f32(p + 8);
    pt.intensity = load_f32(p + 12);
    bool ok = std::isfinite(pt.x) && std::isfinite(pt.y) && std::isfinite(pt.z) &&
              std::isfinite(pt.intensity) && pt.intensity >= 0.0f && pt.range() > 0.0;
    if (layout == SweepLayout::XYZI_Layer) {
      const float l = load_f32(p + 16);
      if (std::isfinite(l) && l >= 0.0f && l < 16777216.0f && std::floor(l) == l) {
        pt.layer = static_cast<std::uint32_t>(l);
      } else {
        ok = false;
      }
    }
    if (!ok) bad.push_back(k);
  }
  if (!bad.empty()) throw RecordError(describe(bad), std::move(bad));
  return pc;
}

std::vector<std::byte> encode_sweep(const PointCloud& pc, SweepLayout layout) {
  const std::size_t rec = record_size(layout);
  std::vector<std::byte> out(pc.size() * rec);
  for (std::size_t k = 0; k < pc.size(); ++k) {
    const LidarPoint& pt = pc.points[k];
    std::byte* p = out.data() + k * rec;
    store_f32(p, pt.x);
    store_f32(p + 4, pt.y);
    store_f32(p + 8, pt.z);
    store_f32(p + 12, pt.intensity);
    if (layout == SweepLayout::XYZI_Layer) {
      if (!pt.layer) throw DomainError("point " + std::to_string(k) + " has no layer id");
      store_f32(p + 16, static_cast<float>(*pt.layer));
    }
  }
  return out;
}

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto len = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::byte> bytes(len);
  if (len > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(len))) {
    throw IoError("short read from " + path.string());
  }
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

PointCloud read_sweep(const std::filesystem::path& path, SweepLayout layout) {
  const auto bytes = read_file_bytes(path);
  PointCloud pc = decode_sweep(bytes, layout);
  pc.frame_id = path.stem().string();
  return pc;
}

void write_sweep(const PointCloud& pc, const std::filesystem::path& path, SweepLayout layout) {
  const auto bytes = encode_sweep(pc, layout);
  write_file_atomic(path, bytes);
}

}  // namespace snowsim
