#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sogs/grid.hpp"

namespace sogs::cli {

// A 2D multi-channel array read from a PNG or .npy file. Values are kept as
// doubles, which hold every supported element type exactly, so a permuted
// copy writes back bit-identical elements.
struct GridFile {
  enum class Format { kPng, kNpy };
  enum class DType { kU8, kU16, kF32, kF64 };

  Format format = Format::kNpy;
  DType dtype = DType::kF32;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  bool shape_has_channels = true;  // npy: (H, W, C) rather than (H, W)
  std::vector<double> values;      // row-major H x W x C
};

// Format from the extension (.png or .npy). Errors: kIoError when unreadable,
// kParseError for malformed content, kInvalidInput for unsupported layouts.
GridFile read_grid_file(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_grid_file(const GridFile& grid);

std::vector<std::uint8_t> encode_npy(const GridFile& grid);
GridFile decode_npy(std::span<const std::uint8_t> bytes);

// Requires height == width.
FeatureGrid to_feature_grid(const GridFile& grid);

// Pixel i of the result is pixel perm[i] of the input.
GridFile permute_pixels(const GridFile& grid, std::span<const std::uint32_t> perm);

}  // namespace sogs::cli
