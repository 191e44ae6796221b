#include "sogs/splat_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sogs/error.hpp"

namespace sogs {

SplatCloud::SplatCloud(std::size_t count, bool with_sh_rest)
    : count_(count), sh_rest_channels_(with_sh_rest ? kShRestChannels : 0) {
  for (Attribute a : kAllAttributes) data_[a].assign(count * channels(a), 0.0f);
}

void SplatCloud::validate() const {
  if (count_ == 0) {
    throw Error(ErrorCode::kInvalidInput, "splat cloud is empty");
  }
  if (sh_rest_channels_ != 0 && sh_rest_channels_ != kShRestChannels) {
    throw Error(ErrorCode::kInvalidInput,
                "sh_rest must have 0 or 45 channels, got " +
                    std::to_string(sh_rest_channels_));
  }
  for (Attribute a : kAllAttributes) {
    const auto& v = data_[a];
    if (v.size() != count_ * channels(a)) {
      throw Error(ErrorCode::kInvalidInput,
                  std::string(attribute_name(a)) + " has " +
                      std::to_string(v.size()) + " values, expected " +
                      std::to_string(count_ * channels(a)));
    }
    auto bad = std::find_if(v.begin(), v.end(),
                            [](float x) { return !std::isfinite(x); });
    if (bad != v.end()) {
      const auto index = static_cast<std::size_t>(bad - v.begin());
      throw Error(ErrorCode::kInvalidInput,
                  "non-finite " + std::string(attribute_name(a)) +
                      " value at gaussian " +
                      std::to_string(index / channels(a)));
    }
  }
}

SplatCloud SplatCloud::gather(std::span<const std::uint32_t> indices) const {
  SplatCloud out(indices.size(), has_sh_rest());
  for (Attribute a : kAllAttributes) {
    const std::size_t ch = channels(a);
    if (ch == 0) continue;
    const auto& src = data_[a];
    auto& dst = out.data_[a];
    for (std::size_t i = 0; i < indices.size(); ++i) {
      std::copy_n(src.begin() + indices[i] * ch, ch, dst.begin() + i * ch);
    }
  }
  return out;
}

SplatCloud SplatCloud::without_sh_rest() const {
  SplatCloud out = *this;
  out.sh_rest_channels_ = 0;
  out.data_[Attribute::kShRest].clear();
  return out;
}

}  // namespace sogs
