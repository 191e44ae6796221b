#include "grid_file.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <regex>
#include <string>

#include "sogs/error.hpp"
#include "sogs/image_codec.hpp"

namespace sogs::cli {
namespace {

constexpr char kNpyMagic[] = "\x93NUMPY";

std::size_t element_size(GridFile::DType t) {
  switch (t) {
    case GridFile::DType::kU8:
      return 1;
    case GridFile::DType::kU16:
      return 2;
    case GridFile::DType::kF32:
      return 4;
    case GridFile::DType::kF64:
      return 8;
  }
  return 0;
}

const char* descr(GridFile::DType t) {
  switch (t) {
    case GridFile::DType::kU8:
      return "|u1";
    case GridFile::DType::kU16:
      return "<u2";
    case GridFile::DType::kF32:
      return "<f4";
    case GridFile::DType::kF64:
      return "<f8";
  }
  return "";
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kParseError, "npy: " + what);
}

}  // namespace

GridFile decode_npy(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 10 || std::memcmp(bytes.data(), kNpyMagic, 6) != 0) {
    malformed("missing magic");
  }
  const int major = bytes[6];
  std::size_t header_len = 0, header_at = 0;
  if (major == 1) {
    header_len = bytes[8] | (bytes[9] << 8);
    header_at = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) malformed("truncated header");
    header_len = bytes[8] | (bytes[9] << 8) | (bytes[10] << 16) |
                 (static_cast<std::size_t>(bytes[11]) << 24);
    header_at = 12;
  } else {
    malformed("unsupported version " + std::to_string(major));
  }
  if (header_len > bytes.size() - header_at) malformed("truncated header");
  const std::string header(reinterpret_cast<const char*>(bytes.data()) + header_at,
                           header_len);

  std::smatch m;
  if (!std::regex_search(header, m, std::regex(R"('descr'\s*:\s*'([^']*)')"))) {
    malformed("no descr");
  }
  GridFile grid;
  grid.format = GridFile::Format::kNpy;
  const std::string d = m[1];
  if (d == "|u1" || d == "<u1") {
    grid.dtype = GridFile::DType::kU8;
  } else if (d == "<u2") {
    grid.dtype = GridFile::DType::kU16;
  } else if (d == "<f4") {
    grid.dtype = GridFile::DType::kF32;
  } else if (d == "<f8") {
    grid.dtype = GridFile::DType::kF64;
  } else {
    throw Error(ErrorCode::kInvalidInput, "npy: unsupported dtype " + d);
  }
  if (std::regex_search(header, std::regex(R"('fortran_order'\s*:\s*True)"))) {
    throw Error(ErrorCode::kInvalidInput, "npy: fortran order is not supported");
  }
  if (!std::regex_search(header, m, std::regex(R"('shape'\s*:\s*\(([^)]*)\))"))) {
    malformed("no shape");
  }
  std::vector<std::size_t> shape;
  const std::string dims = m[1];
  const std::regex number(R"(\d+)");
  for (std::sregex_iterator it(dims.begin(), dims.end(), number), end;
       it != end; ++it) {
    shape.push_back(std::stoull(it->str()));
  }
  if (shape.size() != 2 && shape.size() != 3) {
    throw Error(ErrorCode::kInvalidInput, "npy: expected a 2D or 3D array");
  }
  grid.height = shape[0];
  grid.width = shape[1];
  grid.channels = shape.size() == 3 ? shape[2] : 1;
  grid.shape_has_channels = shape.size() == 3;

  const std::size_t count = grid.height * grid.width * grid.channels;
  const std::size_t esize = element_size(grid.dtype);
  const std::size_t data_at = header_at + header_len;
  if (count == 0 || (bytes.size() - data_at) / esize < count) malformed("truncated data");
  grid.values.resize(count);
  const std::uint8_t* p = bytes.data() + data_at;
  static_assert(std::endian::native == std::endian::little, "npy I/O assumes little endian");
  for (std::size_t i = 0; i < count; ++i) {
    switch (grid.dtype) {
      case GridFile::DType::kU8:
        grid.values[i] = p[i];
        break;
      case GridFile::DType::kU16: {
        std::uint16_t v;
        std::memcpy(&v, p + 2 * i, 2);
        grid.values[i] = v;
        break;
      }
      case GridFile::DType::kF32: {
        float v;
        std::memcpy(&v, p + 4 * i, 4);
        grid.values[i] = v;
        break;
      }
      case GridFile::DType::kF64: {
        double v;
        std::memcpy(&v, p + 8 * i, 8);
        grid.values[i] = v;
        break;
      }
    }
  }
  return grid;
}

std::vector<std::uint8_t> encode_npy(const GridFile& grid) {
  std::string header = std::string("{'descr': '") + descr(grid.dtype) +
                       "', 'fortran_order': False, 'shape': (" +
                       std::to_string(grid.height) + ", " + std::to_string(grid.width);
  if (grid.shape_has_channels) header += ", " + std::to_string(grid.channels);
  header += "), }";
  // Pad so that the data starts on a 64-byte boundary.
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header += '\n';

  std::vector<std::uint8_t> out(kNpyMagic, kNpyMagic + 6);
  out.push_back(1);
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(header.size() & 0xff));
  out.push_back(static_cast<std::uint8_t>(header.size() >> 8));
  out.insert(out.end(), header.begin(), header.end());
  const std::size_t esize = element_size(grid.dtype);
  const std::size_t at = out.size();
  out.resize(at + grid.values.size() * esize);
  std::uint8_t* p = out.data() + at;
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const double v = grid.values[i];
    switch (grid.dtype) {
      case GridFile::DType::kU8:
        p[i] = static_cast<std::uint8_t>(v);
        break;
      case GridFile::DType::kU16: {
        const auto u = static_cast<std::uint16_t>(v);
        std::memcpy(p + 2 * i, &u, 2);
        break;
      }
      case GridFile::DType::kF32: {
        const auto f = static_cast<float>(v);
        std::memcpy(p + 4 * i, &f, 4);
        break;
      }
      case GridFile::DType::kF64:
        std::memcpy(p + 8 * i, &v, 8);
        break;
    }
  }
  return out;
}

GridFile read_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  const std::string ext = path.extension().string();
  if (ext == ".npy") return decode_npy(bytes);
  if (ext != ".png") {
    throw Error(ErrorCode::kInvalidInput, "input must be a .png or .npy file: " + path.string());
  }
  ImagePlane image;
  try {
    image = decode_plane(bytes, "png");
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  GridFile grid;
  grid.format = GridFile::Format::kPng;
  grid.dtype = image.bit_depth == 16 ? GridFile::DType::kU16 : GridFile::DType::kU8;
  grid.height = image.height;
  grid.width = image.width;
  grid.channels = image.channels;
  grid.values.assign(image.samples.begin(), image.samples.end());
  return grid;
}

std::vector<std::uint8_t> encode_grid_file(const GridFile& grid) {
  if (grid.format == GridFile::Format::kNpy) return encode_npy(grid);
  ImagePlane image;
  image.width = grid.width;
  image.height = grid.height;
  image.channels = grid.channels;
  image.bit_depth = grid.dtype == GridFile::DType::kU16 ? 16 : 8;
  image.samples.assign(grid.values.begin(), grid.values.end());
  return encode_plane(image, "png");
}

FeatureGrid to_feature_grid(const GridFile& grid) {
  if (grid.height != grid.width) {
    throw Error(ErrorCode::kInvalidInput, "grid must be square, got " +
                                              std::to_string(grid.height) + "x" +
                                              std::to_string(grid.width));
  }
  FeatureGrid out(grid.height, grid.channels);
  std::transform(grid.values.begin(), grid.values.end(), out.values.begin(),
                 [](double v) { return static_cast<float>(v); });
  return out;
}

GridFile permute_pixels(const GridFile& grid, std::span<const std::uint32_t> perm) {
  GridFile out = grid;
  const std::size_t ch = grid.channels;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    std::copy_n(grid.values.begin() + static_cast<std::ptrdiff_t>(perm[i] * ch), ch,
                out.values.begin() + static_cast<std::ptrdiff_t>(i * ch));
  }
  return out;
}

}  // namespace sogs::cli
