#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sogs/grid.hpp"
#include "sogs/plas.hpp"
#include "sogs/quantize.hpp"
#include "sogs/splat_cloud.hpp"

namespace sogs {

// Bundle layout (ZIP, stored entries, in this order):
//   manifest.json            format "sogs/1", see BundleManifest
//   position.<ext>           3 channels, 16-bit (2^14 levels)
//   sh_dc.<ext>              3 channels, 8-bit
//   sh_rest_00..14.<ext>     3 channels each: coefficient k of R, G, B
//   opacity.<ext>            1 channel
//   scale.<ext>              3 channels
//   rotation_0..3.<ext>      1 channel each
// Pixel values are the quantized indices. Every image is side x side and
// pixel (r, c) holds the Gaussian at row-major cell r * side + c.
inline constexpr std::string_view kBundleFormat = "sogs/1";
inline constexpr std::string_view kManifestName = "manifest.json";

struct CompressOptions {
  SortConfig sort;
  AttributeWeights sort_weights = kDefaultSortWeights;
  // false: arrange cells by a seeded random permutation instead of sorting.
  bool sort_enabled = true;
  QuantSpec quant = QuantSpec::defaults();
  bool keep_sh_rest = true;
};

struct StoredAttribute {
  Attribute attribute = Attribute::kPosition;
  std::size_t channels = 0;
  std::uint32_t levels = 0;
  int bit_depth = 8;
  RangeMode mode = RangeMode::kFixed;
  bool contracted = false;  // positions: quantized as contract(x)
  std::string codec;
  int quality = 100;
  // Per channel, in attribute units (world coordinates for positions).
  std::vector<double> min;
  std::vector<double> max;
  // One image per entry; each lists the attribute channels it stores.
  std::vector<std::string> files;
  std::vector<std::vector<std::size_t>> file_channels;

  // Range that indices of `channel` are spread over: contracted for
  // positions, widened to [min, min + 1] for constant channels.
  ValueRange quantized_range(std::size_t channel) const;
};

struct BundleManifest {
  std::string format;
  std::size_t side = 0;
  int sh_degree = 0;
  std::size_t source_count = 0;  // Gaussians before pruning
  bool sorted = true;
  SortConfig sort;
  AttributeWeights sort_weights;
  std::vector<StoredAttribute> attributes;  // canonical order, sh_rest if present

  const StoredAttribute& attribute(Attribute a) const;
};

struct BundleEntryInfo {
  std::string name;
  std::size_t bytes = 0;
};

struct CompressedBundle {
  std::vector<std::uint8_t> bytes;
  BundleManifest manifest;
  std::vector<BundleEntryInfo> entries;
  // Cell i of the grid holds input Gaussian source_index[i].
  std::vector<std::uint32_t> source_index;
  SortReport sort_report;
};

// Prune to the largest square grid, sort, quantize and encode. Throws
// Error(kInvalidInput) for fewer than 4 Gaussians and
// Error(kUnsupportedCodec) when a codec cannot hold a plane (lossy codecs
// are only accepted for sh_dc).
CompressedBundle compress(const SplatCloud& cloud, const CompressOptions& options);

// Inverse of compress, in grid (row-major) order. Any defect raises
// Error(kDecodeError) naming the offending plane; nothing partial is returned.
SplatCloud decompress(std::span<const std::uint8_t> bytes);

BundleManifest read_manifest(std::span<const std::uint8_t> bundle);

// How an attribute's channels are split over images.
std::vector<std::vector<std::size_t>> plane_groups(Attribute a, std::size_t channels);

}  // namespace sogs
