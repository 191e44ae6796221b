#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sogs/attributes.hpp"
#include "sogs/splat_cloud.hpp"

namespace sogs {

// Square grid of side x side cells, each holding `channels` values.
// Storage is cell-major: cell (r, c) occupies
// values[(r * side + c) * channels, ... + channels).
template <class T>
struct Grid {
  std::size_t side = 0;
  std::size_t channels = 0;
  std::vector<T> values;

  Grid() = default;
  Grid(std::size_t side_, std::size_t channels_, T fill = T{})
      : side(side_), channels(channels_), values(side_ * side_ * channels_, fill) {}

  std::size_t cells() const noexcept { return side * side; }

  std::span<T> cell(std::size_t i) noexcept {
    return {values.data() + i * channels, channels};
  }
  std::span<const T> cell(std::size_t i) const noexcept {
    return {values.data() + i * channels, channels};
  }
  T& at(std::size_t r, std::size_t c, std::size_t ch) noexcept {
    return values[(r * side + c) * channels + ch];
  }
  const T& at(std::size_t r, std::size_t c, std::size_t ch) const noexcept {
    return values[(r * side + c) * channels + ch];
  }

  bool operator==(const Grid&) const = default;
};

using FeatureGrid = Grid<float>;

// Maps grid cell -> index of the point stored there.
using Permutation = std::vector<std::uint32_t>;

bool is_permutation_of_iota(std::span<const std::uint32_t> perm);

struct GridLayout {
  std::size_t side = 0;

  std::size_t cells() const noexcept { return side * side; }
};

// Largest square grid that `count` points fill completely: side = floor(sqrt(count)).
GridLayout build_grid_layout(std::size_t count);

// Indices (ascending) of the layout.cells() points with the highest opacity.
// Ties are broken by original index: among equal opacities the later points
// are removed first.
std::vector<std::uint32_t> prune_survivors(const SplatCloud& cloud,
                                           const GridLayout& layout);

// Drops the cloud.size() - layout.cells() lowest-opacity Gaussians, keeping
// the survivors in their original relative order.
SplatCloud prune_to_grid(const SplatCloud& cloud, const GridLayout& layout);

// Activation as seen by the renderer: sigmoid for opacity, exp for scale,
// identity for everything else.
double activate(Attribute a, double raw) noexcept;

using AttributeWeights = PerAttribute<double>;

// Sorting weights used for Gaussian scenes: position, SH DC and scale drive
// the arrangement; opacity, rotation and SH rest do not.
inline constexpr AttributeWeights kDefaultSortWeights{1.0, 1.0, 0.0,
                                                      0.0, 1.0, 0.0};

struct FeatureColumn {
  Attribute attribute = Attribute::kPosition;
  std::size_t channel = 0;
  double min = 0.0;  // activated value range over the cloud
  double max = 0.0;
  double weight = 0.0;

  bool constant() const noexcept { return !(min < max); }
};

struct NormalizationSpec {
  // One entry per feature column; attributes with weight 0 contribute none.
  std::vector<FeatureColumn> columns;
  AttributeWeights weights;

  // Activated attribute value for `feature` in column `column`. Constant
  // columns return their single value.
  double denormalize(std::size_t column, double feature) const;
};

struct SortFeatures {
  FeatureGrid grid;
  NormalizationSpec spec;
};

// Activated attribute values, each channel rescaled to [0, 1] over the
// cloud's own range and multiplied by its attribute weight. Constant channels
// become 0. Requires cloud.size() to be a perfect square.
SortFeatures normalize_for_sorting(const SplatCloud& cloud,
                                   const AttributeWeights& weights);

// Per-attribute side x side planes sharing one cell order.
template <class T>
struct BasicGridStack {
  GridLayout layout;
  std::size_t sh_rest_channels = 0;
  PerAttribute<std::vector<T>> planes;  // cell-major, channels(a) per cell

  std::size_t channels(Attribute a) const noexcept {
    return a == Attribute::kShRest ? sh_rest_channels : fixed_channels(a);
  }
  std::span<T> plane(Attribute a) noexcept { return planes[a]; }
  std::span<const T> plane(Attribute a) const noexcept { return planes[a]; }

  bool operator==(const BasicGridStack&) const = default;
};

using GridStack = BasicGridStack<float>;

// Cell i of every plane receives Gaussian perm[i]. perm must be a bijection
// on [0, cloud.size()) and cloud.size() a perfect square.
GridStack make_grid_stack(const SplatCloud& cloud,
                          std::span<const std::uint32_t> perm);

// Row-major flattening of the stack back into a cloud.
SplatCloud flatten_grid_stack(const GridStack& stack);

}  // namespace sogs
