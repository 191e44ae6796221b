#include "sogs/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sogs/error.hpp"

namespace sogs {

bool is_permutation_of_iota(std::span<const std::uint32_t> perm) {
  std::vector<bool> seen(perm.size(), false);
  for (std::uint32_t p : perm) {
    if (p >= perm.size() || seen[p]) return false;
    seen[p] = true;
  }
  return true;
}

GridLayout build_grid_layout(std::size_t count) {
  if (count == 0) {
    throw Error(ErrorCode::kInvalidInput, "cannot build a grid for 0 points");
  }
  auto side = static_cast<std::size_t>(std::sqrt(static_cast<double>(count)));
  while (side * side > count) --side;
  while ((side + 1) * (side + 1) <= count) ++side;
  return GridLayout{side};
}

std::vector<std::uint32_t> prune_survivors(const SplatCloud& cloud,
                                           const GridLayout& layout) {
  const std::size_t n = cloud.size();
  if (layout.cells() > n) {
    throw Error(ErrorCode::kInvalidInput,
                "grid of " + std::to_string(layout.cells()) +
                    " cells does not fit a cloud of " + std::to_string(n));
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  if (layout.cells() == n) return order;

  // sigmoid is strictly increasing, so ranking logits ranks opacities.
  const auto opacity = cloud.values(Attribute::kOpacity);
  const std::size_t removed = n - layout.cells();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return opacity[a] > opacity[b];
                   });
  // After a stable descending sort, equal opacities keep index order, so the
  // tail holds the lowest opacities with the highest indices among ties.
  order.resize(n - removed);
  std::sort(order.begin(), order.end());
  return order;
}

SplatCloud prune_to_grid(const SplatCloud& cloud, const GridLayout& layout) {
  if (layout.cells() == cloud.size()) return cloud;
  return cloud.gather(prune_survivors(cloud, layout));
}

double activate(Attribute a, double raw) noexcept {
  switch (a) {
    case Attribute::kOpacity:
      return 1.0 / (1.0 + std::exp(-raw));
    case Attribute::kScale:
      return std::exp(raw);
    default:
      return raw;
  }
}

double NormalizationSpec::denormalize(std::size_t column, double feature) const {
  const FeatureColumn& col = columns.at(column);
  if (col.constant() || col.weight == 0.0) return col.min;
  return col.min + feature / col.weight * (col.max - col.min);
}

SortFeatures normalize_for_sorting(const SplatCloud& cloud,
                                   const AttributeWeights& weights) {
  const std::size_t n = cloud.size();
  const GridLayout layout = build_grid_layout(n);
  if (layout.cells() != n) {
    throw Error(ErrorCode::kInvalidInput,
                "normalize_for_sorting needs a square point count, got " +
                    std::to_string(n));
  }

  SortFeatures out;
  out.spec.weights = weights;
  for (Attribute a : kAllAttributes) {
    if (weights[a] < 0.0 || !std::isfinite(weights[a])) {
      throw Error(ErrorCode::kInvalidInput,
                  "negative or non-finite weight for " +
                      std::string(attribute_name(a)));
    }
    if (weights[a] == 0.0) continue;
    for (std::size_t ch = 0; ch < cloud.channels(a); ++ch) {
      out.spec.columns.push_back(FeatureColumn{a, ch,
                                               std::numeric_limits<double>::infinity(),
                                               -std::numeric_limits<double>::infinity(),
                                               weights[a]});
    }
  }

  const std::size_t dims = out.spec.columns.size();
  out.grid = FeatureGrid(layout.side, dims);
  for (std::size_t d = 0; d < dims; ++d) {
    FeatureColumn& col = out.spec.columns[d];
    const auto values = cloud.values(col.attribute);
    const std::size_t stride = cloud.channels(col.attribute);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = activate(col.attribute, values[i * stride + col.channel]);
      col.min = std::min(col.min, v);
      col.max = std::max(col.max, v);
    }
    if (col.constant()) continue;  // grid already zero-filled
    const double inv_range = 1.0 / (col.max - col.min);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = activate(col.attribute, values[i * stride + col.channel]);
      out.grid.values[i * dims + d] =
          static_cast<float>((v - col.min) * inv_range * col.weight);
    }
  }
  return out;
}

GridStack make_grid_stack(const SplatCloud& cloud,
                          std::span<const std::uint32_t> perm) {
  const GridLayout layout = build_grid_layout(cloud.size());
  if (layout.cells() != cloud.size() || perm.size() != cloud.size() ||
      !is_permutation_of_iota(perm)) {
    throw Error(ErrorCode::kInvalidInput,
                "grid stack needs a square cloud and a matching bijection");
  }
  GridStack stack;
  stack.layout = layout;
  stack.sh_rest_channels = cloud.channels(Attribute::kShRest);
  const SplatCloud arranged = cloud.gather(perm);
  for (Attribute a : kAllAttributes) {
    const auto v = arranged.values(a);
    stack.planes[a].assign(v.begin(), v.end());
  }
  return stack;
}

SplatCloud flatten_grid_stack(const GridStack& stack) {
  SplatCloud cloud(stack.layout.cells(), stack.sh_rest_channels != 0);
  for (Attribute a : kAllAttributes) {
    auto dst = cloud.values(a);
    const auto& src = stack.planes[a];
    if (src.size() != dst.size()) {
      throw Error(ErrorCode::kInvalidInput,
                  "plane " + std::string(attribute_name(a)) +
                      " does not match the grid layout");
    }
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return cloud;
}

}  // namespace sogs
