#include "sogs/zip_archive.hpp"

#include <zlib.h>

#include <algorithm>
#include <limits>
#include <string>

#include "sogs/error.hpp"

namespace sogs {
namespace {

constexpr std::uint32_t kLocalHeader = 0x04034b50;
constexpr std::uint32_t kCentralHeader = 0x02014b50;
constexpr std::uint32_t kEndOfCentralDirectory = 0x06054b50;
constexpr std::uint16_t kVersion = 20;
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01
constexpr std::size_t kLocalHeaderSize = 30;
constexpr std::size_t kCentralHeaderSize = 46;
constexpr std::size_t kEndRecordSize = 22;

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t crc32_of(std::span<const std::uint8_t> data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  while (done < data.size()) {
    const auto chunk = static_cast<uInt>(
        std::min<std::size_t>(data.size() - done, std::numeric_limits<uInt>::max()));
    crc = crc32(crc, data.data() + done, chunk);
    done += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorCode::kDecodeError, "zip: " + what);
}

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void need(std::size_t offset, std::size_t length, const char* what) const {
    if (offset > bytes_.size() || length > bytes_.size() - offset) {
      corrupt(std::string("truncated ") + what);
    }
  }
  std::uint16_t u16(std::size_t offset) const {
    need(offset, 2, "field");
    return static_cast<std::uint16_t>(bytes_[offset] | (bytes_[offset + 1] << 8));
  }
  std::uint32_t u32(std::size_t offset) const {
    need(offset, 4, "field");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[offset + static_cast<std::size_t>(i)];
    return v;
  }

 private:
  std::span<const std::uint8_t> bytes_;
};

}  // namespace

std::vector<std::uint8_t> write_zip(std::span<const ZipEntry> entries) {
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> central;
  for (const ZipEntry& e : entries) {
    if (e.name.empty() || e.name.size() > 0xffff) {
      throw Error(ErrorCode::kInvalidInput, "zip entry names must be 1-65535 bytes");
    }
    if (e.data.size() > 0xfffffffeu || out.size() > 0xfffffffeu) {
      throw Error(ErrorCode::kInvalidInput, "zip entry too large (no zip64 support)");
    }
    const std::uint32_t crc = crc32_of(e.data);
    const auto size = static_cast<std::uint32_t>(e.data.size());
    const auto offset = static_cast<std::uint32_t>(out.size());
    const auto name_len = static_cast<std::uint16_t>(e.name.size());

    put32(out, kLocalHeader);
    put16(out, kVersion);
    put16(out, 0);  // flags
    put16(out, 0);  // stored
    put16(out, 0);  // time
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, size);
    put32(out, size);
    put16(out, name_len);
    put16(out, 0);  // extra
    out.insert(out.end(), e.name.begin(), e.name.end());
    out.insert(out.end(), e.data.begin(), e.data.end());

    put32(central, kCentralHeader);
    put16(central, kVersion);  // made by
    put16(central, kVersion);  // needed
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, kDosDate);
    put32(central, crc);
    put32(central, size);
    put32(central, size);
    put16(central, name_len);
    put16(central, 0);  // extra
    put16(central, 0);  // comment
    put16(central, 0);  // disk
    put16(central, 0);  // internal attributes
    put32(central, 0);  // external attributes
    put32(central, offset);
    central.insert(central.end(), e.name.begin(), e.name.end());
  }
  const auto central_offset = static_cast<std::uint32_t>(out.size());
  out.insert(out.end(), central.begin(), central.end());
  put32(out, kEndOfCentralDirectory);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(entries.size()));
  put16(out, static_cast<std::uint16_t>(entries.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, central_offset);
  put16(out, 0);  // comment
  return out;
}

std::vector<ZipEntry> read_zip(std::span<const std::uint8_t> bytes) {
  const Cursor in(bytes);
  if (bytes.size() < kEndRecordSize) corrupt("archive too small");
  // The end record sits at the very end unless a comment follows it.
  std::size_t eocd = bytes.size() - kEndRecordSize;
  const std::size_t lowest = bytes.size() >= kEndRecordSize + 0xffff
                                 ? bytes.size() - kEndRecordSize - 0xffff
                                 : 0;
  while (in.u32(eocd) != kEndOfCentralDirectory) {
    if (eocd == lowest) corrupt("end of central directory not found");
    --eocd;
  }
  const std::uint16_t count = in.u16(eocd + 10);
  const std::uint32_t dir_size = in.u32(eocd + 12);
  const std::uint32_t dir_offset = in.u32(eocd + 16);
  in.need(dir_offset, dir_size, "central directory");

  std::vector<ZipEntry> entries;
  std::size_t p = dir_offset;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (in.u32(p) != kCentralHeader) corrupt("bad central directory signature");
    const std::uint16_t method = in.u16(p + 10);
    const std::uint32_t crc = in.u32(p + 16);
    const std::uint32_t compressed = in.u32(p + 20);
    const std::uint32_t size = in.u32(p + 24);
    const std::uint16_t name_len = in.u16(p + 28);
    const std::uint16_t extra_len = in.u16(p + 30);
    const std::uint16_t comment_len = in.u16(p + 32);
    const std::uint32_t local = in.u32(p + 42);
    in.need(p + kCentralHeaderSize, name_len, "entry name");
    ZipEntry entry;
    entry.name.assign(reinterpret_cast<const char*>(bytes.data()) + p + kCentralHeaderSize,
                      name_len);
    if (method != 0 || compressed != size) {
      corrupt("entry '" + entry.name + "' is not stored uncompressed");
    }
    if (in.u32(local) != kLocalHeader) corrupt("bad local header for '" + entry.name + "'");
    const std::size_t data_at =
        local + kLocalHeaderSize + in.u16(local + 26) + in.u16(local + 28);
    in.need(data_at, size, "entry data");
    entry.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(data_at),
                      bytes.begin() + static_cast<std::ptrdiff_t>(data_at + size));
    if (crc32_of(entry.data) != crc) corrupt("CRC mismatch in '" + entry.name + "'");
    entries.push_back(std::move(entry));
    p += kCentralHeaderSize + name_len + extra_len + comment_len;
  }
  return entries;
}

}  // namespace sogs
