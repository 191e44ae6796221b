#include "sogs/plas.hpp"

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/parallel_reduce.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "parallel.hpp"
#include "sogs/blur.hpp"
#include "sogs/error.hpp"
#include "sogs/rng.hpp"

namespace sogs {
namespace {

constexpr std::size_t factorial(std::size_t n) { return n <= 1 ? 1 : n * factorial(n - 1); }

template <std::size_t N>
constexpr auto make_arrangements() {
  std::array<std::array<std::uint8_t, 4>, factorial(N)> out{};
  std::array<std::uint8_t, N> p{};
  for (std::size_t i = 0; i < N; ++i) p[i] = static_cast<std::uint8_t>(i);
  std::size_t k = 0;
  do {
    for (std::size_t i = 0; i < 4; ++i) {
      out[k][i] = i < N ? p[i] : static_cast<std::uint8_t>(i);
    }
    ++k;
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

constexpr auto kArrangements1 = make_arrangements<1>();
constexpr auto kArrangements2 = make_arrangements<2>();
constexpr auto kArrangements3 = make_arrangements<3>();
constexpr auto kArrangements4 = make_arrangements<4>();

template <std::size_t N, std::size_t M>
Arrangement scan(const GroupCosts& costs,
                 const std::array<std::array<std::uint8_t, 4>, M>& table) {
  Arrangement best;
  best.cost = 0;
  for (std::size_t i = 0; i < N; ++i) best.cost += costs[i][i];
  for (std::size_t k = 1; k < M; ++k) {
    std::int64_t c = 0;
    for (std::size_t i = 0; i < N; ++i) c += costs[i][table[k][i]];
    if (c < best.cost) {
      best.cost = c;
      best.slot = table[k];
    }
  }
  return best;
}

inline double cell_distance(const float* a, const float* b, std::size_t dims) {
  double s = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    const double t = static_cast<double>(a[d]) - b[d];
    s += t * t;
  }
  return std::sqrt(s);
}

std::int64_t total_cost(const FeatureGrid& grid, const FeatureGrid& target,
                        const CostScale& scale) {
  const std::size_t dims = grid.channels;
  return tbb::parallel_reduce(
      tbb::blocked_range<std::size_t>(0, grid.cells()), std::int64_t{0},
      [&](const tbb::blocked_range<std::size_t>& r, std::int64_t acc) {
        for (std::size_t i = r.begin(); i != r.end(); ++i) {
          acc += scale.to_cost(cell_distance(grid.values.data() + i * dims,
                                             target.values.data() + i * dims, dims));
        }
        return acc;
      },
      std::plus<>());
}

}  // namespace

void SortConfig::validate() const {
  if (!(improvement_threshold > 0.0) || !std::isfinite(improvement_threshold)) {
    throw Error(ErrorCode::kInvalidInput, "improvement threshold must be > 0");
  }
  if (!(radius_decay > 0.0 && radius_decay < 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "radius decay must lie in (0, 1)");
  }
  if (min_block_size < 2) {
    throw Error(ErrorCode::kInvalidInput, "minimum block size must be >= 2");
  }
}

FeatureGrid blur_target(const FeatureGrid& grid, double radius) {
  if (!(radius >= 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "blur radius must be >= 1");
  }
  return gaussian_blur(grid, static_cast<std::size_t>(std::ceil(radius)),
                       radius / 2.0);
}

double grid_distance(const FeatureGrid& grid, const FeatureGrid& target,
                     std::span<const double> weights) {
  if (grid.side != target.side || grid.channels != target.channels) {
    throw Error(ErrorCode::kInvalidInput, "grid and target shapes differ");
  }
  if (!weights.empty() && weights.size() != grid.channels) {
    throw Error(ErrorCode::kInvalidInput, "one weight per channel required");
  }
  if (grid.cells() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    double s = 0.0;
    for (std::size_t d = 0; d < grid.channels; ++d) {
      double t = static_cast<double>(grid.cell(i)[d]) - target.cell(i)[d];
      if (!weights.empty()) t *= weights[d];
      s += t * t;
    }
    sum += std::sqrt(s);
  }
  return sum / static_cast<double>(grid.cells());
}

std::size_t block_size_for_radius(double radius, std::size_t min_block_size,
                                  std::size_t side) {
  const auto from_radius = static_cast<std::size_t>(std::floor(std::max(radius, 0.0))) + 1;
  return std::min(std::max(min_block_size, from_radius), side);
}

std::vector<Block> partition_blocks(std::size_t side, std::size_t block_size,
                                    std::size_t dy, std::size_t dx) {
  if (block_size == 0 || dy >= block_size || dx >= block_size) {
    throw Error(ErrorCode::kInvalidInput, "block offsets must lie in [0, block size)");
  }
  const auto s = static_cast<std::ptrdiff_t>(side);
  const auto b = static_cast<std::ptrdiff_t>(block_size);
  auto spans = [&](std::size_t offset) {
    // (start, length, offset inside frame)
    std::vector<std::array<std::size_t, 3>> out;
    for (std::ptrdiff_t f = offset ? static_cast<std::ptrdiff_t>(offset) - b : 0; f < s;
         f += b) {
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(f, 0);
      const std::ptrdiff_t hi = std::min(f + b, s);
      out.push_back({static_cast<std::size_t>(lo), static_cast<std::size_t>(hi - lo),
                     static_cast<std::size_t>(lo - f)});
    }
    return out;
  };
  const auto rows = spans(dy);
  const auto cols = spans(dx);
  std::vector<Block> blocks;
  blocks.reserve(rows.size() * cols.size());
  for (const auto& r : rows) {
    for (const auto& c : cols) {
      blocks.push_back(Block{r[0], c[0], r[1], c[1], r[2], c[2]});
    }
  }
  return blocks;
}

CostScale CostScale::for_extent(double max_distance, std::size_t cells) {
  // Leave two bits of headroom below 2^63 for rounding and deltas.
  constexpr double kBudget = 0x1.0p61;
  if (!(max_distance > 0.0) || cells == 0) return CostScale(1.0);
  return CostScale(kBudget / (static_cast<double>(cells) * max_distance));
}

CostScale CostScale::for_grid(const FeatureGrid& grid) {
  double diag2 = 0.0;
  for (std::size_t d = 0; d < grid.channels; ++d) {
    float lo = std::numeric_limits<float>::infinity();
    float hi = -lo;
    for (std::size_t i = 0; i < grid.cells(); ++i) {
      lo = std::min(lo, grid.cell(i)[d]);
      hi = std::max(hi, grid.cell(i)[d]);
    }
    const double span = static_cast<double>(hi) - lo;
    diag2 += span * span;
  }
  // Float rounding can push a distance marginally past the diagonal.
  return for_extent(std::sqrt(diag2) * 1.001, grid.cells());
}

Arrangement best_arrangement(const GroupCosts& costs, std::size_t count) {
  switch (count) {
    case 1:
      return scan<1>(costs, kArrangements1);
    case 2:
      return scan<2>(costs, kArrangements2);
    case 3:
      return scan<3>(costs, kArrangements3);
    case 4:
      return scan<4>(costs, kArrangements4);
    default:
      throw Error(ErrorCode::kInvalidInput, "groups hold 1 to 4 elements");
  }
}

std::int64_t reassign_block(FeatureGrid& grid, Permutation& permutation,
                            const FeatureGrid& target, const Block& block,
                            std::span<const std::uint32_t> grouping,
                            std::size_t block_size, const CostScale& scale) {
  const std::size_t dims = grid.channels;
  const std::size_t side = grid.side;
  float* values = grid.values.data();
  const float* goal = target.values.data();

  std::array<std::size_t, 4> cells{};
  std::size_t count = 0;
  std::int64_t delta = 0;
  std::vector<float> held(4 * dims);

  auto solve = [&] {
    GroupCosts costs{};
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < count; ++j) {
        costs[i][j] = scale.to_cost(
            cell_distance(values + cells[i] * dims, goal + cells[j] * dims, dims));
      }
    }
    const Arrangement best = best_arrangement(costs, count);
    std::int64_t identity = 0;
    for (std::size_t i = 0; i < count; ++i) identity += costs[i][i];
    if (best.cost == identity) return;

    std::array<std::uint32_t, 4> held_index{};
    for (std::size_t i = 0; i < count; ++i) {
      std::copy_n(values + cells[i] * dims, dims, held.data() + i * dims);
      held_index[i] = permutation[cells[i]];
    }
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t dst = cells[best.slot[i]];
      std::copy_n(held.data() + i * dims, dims, values + dst * dims);
      permutation[dst] = held_index[i];
    }
    delta += best.cost - identity;
  };

  for (std::uint32_t f : grouping) {
    const std::size_t fr = f / block_size;
    const std::size_t fc = f % block_size;
    if (fr < block.frame_row || fc < block.frame_col) continue;
    const std::size_t r = fr - block.frame_row;
    const std::size_t c = fc - block.frame_col;
    if (r >= block.rows || c >= block.cols) continue;
    cells[count++] = (block.row0 + r) * side + block.col0 + c;
    if (count == 4) {
      solve();
      count = 0;
    }
  }
  if (count > 0) solve();
  return delta;
}

FeatureGrid apply_permutation(const FeatureGrid& features,
                              std::span<const std::uint32_t> perm) {
  if (perm.size() != features.cells()) {
    throw Error(ErrorCode::kInvalidInput, "permutation length differs from cell count");
  }
  FeatureGrid out(features.side, features.channels);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    std::copy_n(features.values.data() + perm[i] * features.channels,
                features.channels, out.values.data() + i * features.channels);
  }
  return out;
}

SortResult sort_grid(const FeatureGrid& features, const SortConfig& config,
                     const SortObserver& observer) {
  config.validate();
  const std::size_t side = features.side;
  if (side < 2) {
    throw Error(ErrorCode::kInvalidInput,
                "sorting needs a grid side of at least 2, got " + std::to_string(side));
  }
  if (features.channels == 0 ||
      features.values.size() != features.cells() * features.channels) {
    throw Error(ErrorCode::kInvalidInput, "feature grid has no channels or bad size");
  }
  if (std::any_of(features.values.begin(), features.values.end(),
                  [](float v) { return !std::isfinite(v); })) {
    throw Error(ErrorCode::kInvalidInput, "feature grid contains non-finite values");
  }

  const auto start = std::chrono::steady_clock::now();
  CounterRng rng(config.seed);
  SortResult result;
  result.permutation = random_permutation(features.cells(), rng);
  FeatureGrid grid = apply_permutation(features, result.permutation);
  const CostScale scale = CostScale::for_grid(features);
  const double cells = static_cast<double>(features.cells());

  detail::run_with_workers(config.threads, [&] {
    std::vector<std::uint32_t> grouping;
    std::vector<std::int64_t> deltas;
    double radius = static_cast<double>(side) / 2.0 - 1.0;
    for (std::size_t level = 0; radius >= 1.0; ++level, radius *= config.radius_decay) {
      const FeatureGrid target = blur_target(grid, radius);
      const std::size_t beta = block_size_for_radius(radius, config.min_block_size, side);
      std::int64_t total = total_cost(grid, target, scale);

      LevelTrace trace{radius, beta, 0, scale.to_distance(total) / cells, 0.0};
      int stalls = 0;
      for (std::size_t pass = 0;; ++pass) {
        const std::size_t dy = rng.below(beta);
        const std::size_t dx = rng.below(beta);
        grouping = random_permutation(beta * beta, rng);
        const std::vector<Block> blocks = partition_blocks(side, beta, dy, dx);

        deltas.assign(blocks.size(), 0);
        tbb::parallel_for(std::size_t{0}, blocks.size(), [&](std::size_t b) {
          deltas[b] = reassign_block(grid, result.permutation, target, blocks[b],
                                     grouping, beta, scale);
        });
        const std::int64_t after =
            total + std::accumulate(deltas.begin(), deltas.end(), std::int64_t{0});

        ++trace.passes;
        ++result.report.reorders;
        if (observer) {
          PassInfo info{radius, beta, level, pass, dy, dx, total, after,
                        scale.to_distance(total) / cells, scale.to_distance(after) / cells};
          observer(info, grid, result.permutation, target);
        }

        const double improvement =
            total > 0 ? static_cast<double>(total - after) / static_cast<double>(total)
                      : 0.0;
        total = after;
        if (improvement < config.improvement_threshold) {
          if (++stalls == 2) break;
        } else {
          stalls = 0;
        }
      }
      trace.distance_end = scale.to_distance(total) / cells;
      result.report.levels.push_back(trace);
    }
  });

  result.report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace sogs
