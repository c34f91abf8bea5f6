#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "snowsim/point_cloud.hpp"

namespace snowsim {

/// On-disk record layout of a sweep file. Both layouts are flat little-endian
/// IEEE-754 float32 records without a header, so `XYZI` files are
/// interchangeable with KITTI velodyne `.bin` scans.
enum class SweepLayout {
  XYZI,       // x, y, z, intensity (16 bytes)
  XYZI_Layer  // x, y, z, intensity, layer stored as an integral float (20 bytes)
};

constexpr std::size_t record_size(SweepLayout layout) noexcept {
  return layout == SweepLayout::XYZI ? 16 : 20;
}

/// Decodes an in-memory sweep payload. Throws FormatError when the length is
/// not a multiple of the record size and RecordError listing every offending
/// record index for non-finite values, zero range, negative intensity or a
/// malformed layer field.
PointCloud decode_sweep(std::span<const std::byte> bytes, SweepLayout layout = SweepLayout::XYZI);

std::vector<std::byte> encode_sweep(const PointCloud& pc, SweepLayout layout = SweepLayout::XYZI);

PointCloud read_sweep(const std::filesystem::path& path, SweepLayout layout = SweepLayout::XYZI);

/// Writes through a temporary sibling file and renames it into place.
void write_sweep(const PointCloud& pc, const std::filesystem::path& path,
                 SweepLayout layout = SweepLayout::XYZI);

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes);

}  // namespace snowsim
