#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace sogs {

// Gaussian attributes in their canonical storage order.
enum class Attribute : std::uint8_t {
  kPosition,
  kShDc,
  kShRest,
  kOpacity,
  kScale,
  kRotation,
};

inline constexpr std::size_t kAttributeCount = 6;
inline constexpr std::array<Attribute, kAttributeCount> kAllAttributes{
    Attribute::kPosition, Attribute::kShDc,  Attribute::kShRest,
    Attribute::kOpacity,  Attribute::kScale, Attribute::kRotation};

// Degree-3 spherical harmonics: 15 coefficients per color channel.
inline constexpr std::size_t kShRestChannels = 45;

// Channel count of each attribute; sh_rest is either 0 or kShRestChannels.
constexpr std::size_t fixed_channels(Attribute a) noexcept {
  switch (a) {
    case Attribute::kPosition:
    case Attribute::kShDc:
    case Attribute::kScale:
      return 3;
    case Attribute::kOpacity:
      return 1;
    case Attribute::kRotation:
      return 4;
    case Attribute::kShRest:
      return kShRestChannels;
  }
  return 0;
}

std::string_view attribute_name(Attribute a) noexcept;
std::optional<Attribute> parse_attribute(std::string_view name) noexcept;

// A value per attribute, indexed by Attribute.
template <class T>
class PerAttribute {
 public:
  constexpr PerAttribute() = default;
  constexpr PerAttribute(T position, T sh_dc, T sh_rest, T opacity, T scale,
                         T rotation)
      : values_{position, sh_dc, sh_rest, opacity, scale, rotation} {}

  constexpr T& operator[](Attribute a) noexcept {
    return values_[static_cast<std::size_t>(a)];
  }
  constexpr const T& operator[](Attribute a) const noexcept {
    return values_[static_cast<std::size_t>(a)];
  }

  constexpr bool operator==(const PerAttribute&) const = default;

 private:
  std::array<T, kAttributeCount> values_{};
};

}  // namespace sogs
