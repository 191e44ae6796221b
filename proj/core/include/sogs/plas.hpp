#pragma once

// Parallel linear assignment sorting: arranges feature vectors on a square
// grid so that neighbouring cells hold similar features.
//
// The grid starts from a seeded random arrangement. For a decaying radius
// phi (starting at side/2 - 1) the current grid is low-pass filtered into a
// fixed target, then block passes move features toward their best-matching
// target cells until the mean L2 distance to the target stalls:
//
//   * The grid is tiled into blocks of size beta = max(min_block_size,
//     floor(phi) + 1), capped at the grid side, shifted by a random offset.
//   * One random permutation of the beta x beta frame is drawn per pass and
//     shared by every block; consecutive in-block entries form groups of 4.
//   * Each group takes whichever of its 24 arrangements has the lowest total
//     distance to the target (leftover groups of 1-3 try all of theirs).
//
// A pass whose relative improvement is below the threshold is followed by one
// more pass at fresh offsets; a second consecutive stall shrinks phi by the
// decay factor. Sorting ends when phi drops below 1.
//
// Random draw order, all from one CounterRng(seed):
//   initial permutation (Fisher-Yates over side^2 cells), then for each pass
//   dy, dx (each below(beta)) and the beta^2 grouping permutation.
// Blocks are independent and per-pass costs are accumulated as fixed-point
// integers, so the result is bit-identical for any number of worker threads.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sogs/grid.hpp"

namespace sogs {

struct SortConfig {
  double improvement_threshold = 1e-4;
  double radius_decay = 0.95;
  std::size_t min_block_size = 16;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0: use every available core

  void validate() const;
};

// Target for radius phi: Gaussian blur with half-width ceil(phi) and
// sigma = phi / 2, renormalized at the borders.
FeatureGrid blur_target(const FeatureGrid& grid, double radius);

// Mean over cells of the Euclidean distance between grid and target. With a
// non-empty `weights` (one per channel) each channel difference is scaled by
// its weight first.
double grid_distance(const FeatureGrid& grid, const FeatureGrid& target,
                     std::span<const double> weights = {});

std::size_t block_size_for_radius(double radius, std::size_t min_block_size,
                                  std::size_t side);

// Rectangular block of cells. (frame_row, frame_col) is the offset of the
// block's first cell inside its block_size x block_size frame; border blocks
// are the visible part of a frame that hangs over the grid edge.
struct Block {
  std::size_t row0 = 0;
  std::size_t col0 = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t frame_row = 0;
  std::size_t frame_col = 0;

  bool operator==(const Block&) const = default;
};

// Frames start at dy - block_size, dy, dy + block_size, ... (same for dx),
// clipped to the grid. Requires dy, dx < block_size.
std::vector<Block> partition_blocks(std::size_t side, std::size_t block_size,
                                    std::size_t dy, std::size_t dx);

// Converts distances to fixed-point integers so pass totals are exact and
// independent of summation order.
class CostScale {
 public:
  CostScale() = default;
  explicit CostScale(double units_per_distance) : scale_(units_per_distance) {}

  // Resolution chosen so that `cells` distances of at most `max_distance`
  // sum without overflow.
  static CostScale for_extent(double max_distance, std::size_t cells);
  static CostScale for_grid(const FeatureGrid& grid);

  std::int64_t to_cost(double distance) const noexcept {
    return static_cast<std::int64_t>(distance * scale_ + 0.5);
  }
  double to_distance(std::int64_t cost) const noexcept {
    return static_cast<double>(cost) / scale_;
  }
  double units() const noexcept { return scale_; }

 private:
  double scale_ = 1.0;
};

// costs[i][j]: cost of placing group element i at slot j.
using GroupCosts = std::array<std::array<std::int64_t, 4>, 4>;

struct Arrangement {
  std::array<std::uint8_t, 4> slot{0, 1, 2, 3};  // element i -> slot[i]
  std::int64_t cost = 0;
};

// Cheapest assignment of `count` (1..4) elements to their own slots.
// Arrangements are scanned in lexicographic order starting from the
// identity and only a strictly cheaper one replaces the current best.
Arrangement best_arrangement(const GroupCosts& costs, std::size_t count);

// One block of one pass: groups the block's cells by `grouping` (a
// permutation of the block_size^2 frame indices), and rearranges each group
// of up to 4 cells optimally against `target`. grid and permutation are
// updated in place. Returns the change of the block's fixed-point cost
// (never positive).
std::int64_t reassign_block(FeatureGrid& grid, Permutation& permutation,
                            const FeatureGrid& target, const Block& block,
                            std::span<const std::uint32_t> grouping,
                            std::size_t block_size, const CostScale& scale);

struct PassInfo {
  double radius = 0.0;
  std::size_t block_size = 0;
  std::size_t level = 0;        // index of the radius level
  std::size_t pass = 0;         // pass index within the level
  std::size_t dy = 0;
  std::size_t dx = 0;
  std::int64_t cost_before = 0;  // fixed-point totals against the target
  std::int64_t cost_after = 0;
  double distance_before = 0.0;  // mean L2 to target
  double distance_after = 0.0;
};

struct LevelTrace {
  double radius = 0.0;
  std::size_t block_size = 0;
  std::size_t passes = 0;
  double distance_start = 0.0;
  double distance_end = 0.0;
};

struct SortReport {
  std::size_t reorders = 0;  // total block passes
  double seconds = 0.0;
  std::vector<LevelTrace> levels;
};

struct SortResult {
  Permutation permutation;  // grid cell -> input row
  SortReport report;
};

// Called after every pass with the current arrangement and the level target.
using SortObserver =
    std::function<void(const PassInfo&, const FeatureGrid& grid,
                       const Permutation& permutation, const FeatureGrid& target)>;

// Sorts the side^2 rows of `features` (given as a grid in input order).
// Throws Error(kInvalidInput) for side < 2, zero channels or non-finite
// features.
SortResult sort_grid(const FeatureGrid& features, const SortConfig& config,
                     const SortObserver& observer = {});

// features arranged by permutation: cell i holds features row perm[i].
FeatureGrid apply_permutation(const FeatureGrid& features,
                              std::span<const std::uint32_t> perm);

}  // namespace sogs
