#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sogs {

// Integer image: height x width pixels of `channels` interleaved samples.
struct ImagePlane {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;
  int bit_depth = 8;  // 8 or 16
  std::vector<std::uint16_t> samples;

  bool operator==(const ImagePlane&) const = default;
};

struct CodecCapabilities {
  bool lossless = true;
  bool supports_8bit = true;
  bool supports_16bit = false;
  std::vector<std::size_t> channel_counts;
};

class ImageCodec {
 public:
  virtual ~ImageCodec() = default;

  virtual std::string_view tag() const noexcept = 0;
  virtual std::string_view extension() const noexcept = 0;
  virtual const CodecCapabilities& capabilities() const noexcept = 0;

  // `quality` (0-100) matters to lossy codecs only.
  virtual std::vector<std::uint8_t> encode(const ImagePlane& plane, int quality) const = 0;
  virtual ImagePlane decode(std::span<const std::uint8_t> bytes) const = 0;

  bool supports(int bit_depth, std::size_t channels) const noexcept;
};

// Registered codecs: "png" (lossless, 8/16-bit, 1/3/4 channels) and "jpeg"
// (lossy, 8-bit, 1/3 channels). Unknown tags, including "jxl" on builds
// without JPEG XL, throw Error(kUnsupportedCodec).
const ImageCodec& find_codec(std::string_view tag);
std::vector<std::string> codec_tags();

// Validates that the samples fit bit_depth and that the codec handles the
// layout (kUnsupportedCodec otherwise), then encodes.
std::vector<std::uint8_t> encode_plane(const ImagePlane& plane, std::string_view tag,
                                       int quality = 100);
ImagePlane decode_plane(std::span<const std::uint8_t> bytes, std::string_view tag);

}  // namespace sogs
