#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sogs {

struct ZipEntry {
  std::string name;
  std::vector<std::uint8_t> data;

  bool operator==(const ZipEntry&) const = default;
};

// Uncompressed ("stored") ZIP archive with entries in the given order and a
// fixed 1980-01-01 timestamp, so equal inputs give equal bytes.
std::vector<std::uint8_t> write_zip(std::span<const ZipEntry> entries);

// Reads a stored-only archive via its central directory, checking
// signatures, bounds and CRC-32. Throws Error(kDecodeError) on any defect.
std::vector<ZipEntry> read_zip(std::span<const std::uint8_t> bytes);

}  // namespace sogs
