#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sogs/attributes.hpp"

namespace sogs {

// Space contraction: expand(x) = sign(x) (exp|x| - 1) gives more relative
// precision near the origin; contract(x) = sign(x) ln(1 + |x|) inverts it.
double expand(double contracted);
double contract(double x) noexcept;

struct ValueRange {
  double min = 0.0;
  double max = 1.0;
};

// Clamps v into the range, maps it to [0, 1] and rounds (levels - 1) * t half
// away from zero. Saturating: out-of-range values land on 0 or levels - 1.
std::uint32_t quantize(double v, ValueRange range, std::uint32_t levels);
std::vector<std::uint32_t> quantize(std::span<const double> values, ValueRange range,
                                    std::uint32_t levels);

// range.min + index / (levels - 1) * (range.max - range.min). Throws
// Error(kInvalidInput) for index >= levels.
double dequantize(std::uint32_t index, ValueRange range, std::uint32_t levels);
std::vector<double> dequantize(std::span<const std::uint32_t> indices,
                               ValueRange range, std::uint32_t levels);

// Largest distance between a value inside the range and its reconstruction.
inline double half_step(ValueRange range, std::uint32_t levels) noexcept {
  return (range.max - range.min) / (2.0 * (levels - 1));
}

enum class RangeMode {
  kFixed,       // clip to [clip_min, clip_max]
  kDataDriven,  // per-channel min/max of the data, stored in the bundle
};

struct AttributeQuant {
  RangeMode mode = RangeMode::kFixed;
  double clip_min = 0.0;
  double clip_max = 1.0;
  std::uint32_t levels = 64;
  std::string codec = "png";
  int quality = 100;  // used by lossy codecs only

  bool operator==(const AttributeQuant&) const = default;
};

struct QuantSpec {
  PerAttribute<AttributeQuant> attributes;

  // Clip ranges cover the bulk of trained-scene values; positions (after
  // contraction) and scales use their own data range.
  //   position  data-driven, 2^14 levels
  //   sh_dc     [-2, 4],     2^8 levels
  //   sh_rest   [-1, 1],     2^5 levels
  //   opacity   [-6, 12],    2^6 levels
  //   scale     data-driven, 2^6 levels
  //   rotation  [-1, 2],     2^6 levels
  static QuantSpec defaults();

  // Throws Error(kInvalidInput) unless clip_min < clip_max and
  // 2 <= levels <= 65536 for every attribute.
  void validate() const;

  bool operator==(const QuantSpec&) const = default;
};

}  // namespace sogs
