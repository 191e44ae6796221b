#include "sogs/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sogs/error.hpp"

namespace sogs {

double expand(double contracted) {
  const double a = std::abs(contracted);
  // exp overflows past ln(DBL_MAX) ~= 709.78.
  if (!std::isfinite(contracted) || a > 709.0) {
    throw Error(ErrorCode::kRangeError,
                "cannot expand " + std::to_string(contracted) + ": exp overflows");
  }
  return std::copysign(std::expm1(a), contracted);
}

double contract(double x) noexcept { return std::copysign(std::log1p(std::abs(x)), x); }

std::uint32_t quantize(double v, ValueRange range, std::uint32_t levels) {
  if (levels < 2) throw Error(ErrorCode::kInvalidInput, "quantization needs >= 2 levels");
  if (!(range.min < range.max)) {
    throw Error(ErrorCode::kInvalidInput, "quantization range must satisfy min < max");
  }
  const double clamped = std::clamp(v, range.min, range.max);
  const double t = (clamped - range.min) / (range.max - range.min);
  // t >= 0, so rounding half away from zero is round-half-up here.
  const auto index = static_cast<std::uint32_t>(std::round(t * (levels - 1)));
  return std::min(index, levels - 1);
}

std::vector<std::uint32_t> quantize(std::span<const double> values, ValueRange range,
                                    std::uint32_t levels) {
  std::vector<std::uint32_t> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [&](double v) { return quantize(v, range, levels); });
  return out;
}

double dequantize(std::uint32_t index, ValueRange range, std::uint32_t levels) {
  if (levels < 2) throw Error(ErrorCode::kInvalidInput, "quantization needs >= 2 levels");
  if (index >= levels) {
    throw Error(ErrorCode::kInvalidInput, "quantized index " + std::to_string(index) +
                                              " out of range for " +
                                              std::to_string(levels) + " levels");
  }
  return range.min + static_cast<double>(index) / static_cast<double>(levels - 1) *
                         (range.max - range.min);
}

std::vector<double> dequantize(std::span<const std::uint32_t> indices, ValueRange range,
                               std::uint32_t levels) {
  std::vector<double> out(indices.size());
  std::transform(indices.begin(), indices.end(), out.begin(),
                 [&](std::uint32_t i) { return dequantize(i, range, levels); });
  return out;
}

QuantSpec QuantSpec::defaults() {
  QuantSpec spec;
  spec.attributes[Attribute::kPosition] = {RangeMode::kDataDriven, 0.0, 1.0, 1u << 14};
  spec.attributes[Attribute::kShDc] = {RangeMode::kFixed, -2.0, 4.0, 1u << 8};
  spec.attributes[Attribute::kShRest] = {RangeMode::kFixed, -1.0, 1.0, 1u << 5};
  spec.attributes[Attribute::kOpacity] = {RangeMode::kFixed, -6.0, 12.0, 1u << 6};
  spec.attributes[Attribute::kScale] = {RangeMode::kDataDriven, 0.0, 1.0, 1u << 6};
  spec.attributes[Attribute::kRotation] = {RangeMode::kFixed, -1.0, 2.0, 1u << 6};
  return spec;
}

void QuantSpec::validate() const {
  for (Attribute a : kAllAttributes) {
    const AttributeQuant& q = attributes[a];
    const std::string name(attribute_name(a));
    if (q.levels < 2 || q.levels > 65536) {
      throw Error(ErrorCode::kInvalidInput, name + ": levels must lie in [2, 65536]");
    }
    if (q.mode == RangeMode::kFixed && !(q.clip_min < q.clip_max)) {
      throw Error(ErrorCode::kInvalidInput, name + ": clip_min must be < clip_max");
    }
  }
}

}  // namespace sogs
