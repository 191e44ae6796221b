#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sogs/attributes.hpp"

namespace sogs {

// An ordered list of Gaussians stored attribute-by-attribute with the
// un-activated parameters a 3DGS trainer produces:
//   position       world coordinates
//   sh_dc          SH DC coefficients
//   sh_rest        45 higher-order SH coefficients, or absent (degree 0)
//   opacity        pre-sigmoid logit
//   scale          pre-exponential log scale
//   rotation       unnormalized quaternion (w, x, y, z)
class SplatCloud {
 public:
  SplatCloud() = default;
  SplatCloud(std::size_t count, bool with_sh_rest);

  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  bool has_sh_rest() const noexcept { return sh_rest_channels_ != 0; }
  int sh_degree() const noexcept { return has_sh_rest() ? 3 : 0; }

  std::size_t channels(Attribute a) const noexcept {
    return a == Attribute::kShRest ? sh_rest_channels_ : fixed_channels(a);
  }

  // Row-major count x channels(a) values.
  std::span<float> values(Attribute a) noexcept { return data_[a]; }
  std::span<const float> values(Attribute a) const noexcept { return data_[a]; }

  std::span<float> row(Attribute a, std::size_t i) noexcept {
    return values(a).subspan(i * channels(a), channels(a));
  }
  std::span<const float> row(Attribute a, std::size_t i) const noexcept {
    return values(a).subspan(i * channels(a), channels(a));
  }

  // Throws Error(kInvalidInput) on an empty cloud, inconsistent attribute
  // lengths or non-finite values.
  void validate() const;

  // New cloud holding rows indices[0], indices[1], ... in that order.
  SplatCloud gather(std::span<const std::uint32_t> indices) const;

  // Same cloud without the SH-rest block.
  SplatCloud without_sh_rest() const;

  bool operator==(const SplatCloud&) const = default;

 private:
  std::size_t count_ = 0;
  std::size_t sh_rest_channels_ = 0;
  PerAttribute<std::vector<float>> data_;
};

}  // namespace sogs
