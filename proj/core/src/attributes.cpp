#include "sogs/attributes.hpp"

namespace sogs {

std::string_view attribute_name(Attribute a) noexcept {
  switch (a) {
    case Attribute::kPosition:
      return "position";
    case Attribute::kShDc:
      return "sh_dc";
    case Attribute::kShRest:
      return "sh_rest";
    case Attribute::kOpacity:
      return "opacity";
    case Attribute::kScale:
      return "scale";
    case Attribute::kRotation:
      return "rotation";
  }
  return "";
}

std::optional<Attribute> parse_attribute(std::string_view name) noexcept {
  for (Attribute a : kAllAttributes) {
    if (attribute_name(a) == name) return a;
  }
  return std::nullopt;
}

}  // namespace sogs
