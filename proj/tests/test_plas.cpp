#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "sogs/error.hpp"
#include "sogs/metrics.hpp"
#include "sogs/plas.hpp"
#include "sogs/rng.hpp"
#include "support.hpp"

namespace sogs {
namespace {

// Every ordering of the first `count` slots in lexicographic order; the
// first strictly cheapest wins.
Arrangement brute_force(const GroupCosts& costs, std::size_t count) {
  std::array<std::uint8_t, 4> p{0, 1, 2, 3};
  Arrangement best;
  best.cost = std::numeric_limits<std::int64_t>::max();
  do {
    std::int64_t c = 0;
    for (std::size_t i = 0; i < count; ++i) c += costs[i][p[i]];
    if (c < best.cost) {
      best.cost = c;
      best.slot = p;
    }
  } while (std::next_permutation(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(count)));
  return best;
}

GroupCosts costs_from(const std::array<double, 4>& features, const std::array<double, 4>& targets,
                      std::size_t count) {
  GroupCosts c{};
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      c[i][j] = static_cast<std::int64_t>(std::llround(std::abs(features[i] - targets[j]) * 1000));
    }
  }
  return c;
}

TEST(Assignment, ReversedTargetsReverse) {
  const GroupCosts c = costs_from({0, 1, 2, 3}, {3, 2, 1, 0}, 4);
  const Arrangement a = best_arrangement(c, 4);
  EXPECT_EQ(a.slot, (std::array<std::uint8_t, 4>{3, 2, 1, 0}));
  EXPECT_EQ(a.cost, 0);
  const Arrangement b = brute_force(c, 4);
  EXPECT_EQ(a.slot, b.slot);
  EXPECT_EQ(a.cost, b.cost);
}

TEST(Assignment, OptimalGroupKeepsIdentity) {
  const GroupCosts c = costs_from({0, 1, 2, 3}, {0, 1, 2, 3}, 4);
  EXPECT_EQ(best_arrangement(c, 4).slot, (std::array<std::uint8_t, 4>{0, 1, 2, 3}));
  // All-equal costs: nothing is strictly better than the identity.
  GroupCosts flat{};
  for (auto& row : flat) row.fill(7);
  EXPECT_EQ(best_arrangement(flat, 4).slot, (std::array<std::uint8_t, 4>{0, 1, 2, 3}));
}

TEST(Assignment, LeftoverPairSwaps) {
  const GroupCosts c = costs_from({5, 9, 0, 0}, {9, 5, 0, 0}, 2);
  const Arrangement a = best_arrangement(c, 2);
  EXPECT_EQ(a.slot[0], 1);
  EXPECT_EQ(a.slot[1], 0);
  EXPECT_EQ(a.cost, 0);
}

TEST(Assignment, MatchesBruteForceWithTies) {
  CounterRng rng(99);
  for (int trial = 0; trial < 4000; ++trial) {
    const std::size_t count = 1 + rng.below(4);
    GroupCosts c{};
    // Small cost alphabet so that ties are common.
    const std::uint64_t alphabet = trial % 2 ? 4 : 1000000;
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < count; ++j) c[i][j] = static_cast<std::int64_t>(rng.below(alphabet));
    }
    const Arrangement a = best_arrangement(c, count);
    const Arrangement b = brute_force(c, count);
    ASSERT_EQ(a.cost, b.cost) << "trial " << trial;
    for (std::size_t i = 0; i < count; ++i) ASSERT_EQ(a.slot[i], b.slot[i]) << "trial " << trial;
  }
}

TEST(Partition, SingleAlignedBlock) {
  const auto blocks = partition_blocks(16, 16, 0, 0);
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(blocks[0], (Block{0, 0, 16, 16, 0, 0}));
}

TEST(Partition, HalfShiftGivesFourBlocks) {
  const auto blocks = partition_blocks(16, 16, 8, 8);
  ASSERT_EQ(blocks.size(), 4u);
  for (const Block& b : blocks) {
    EXPECT_EQ(b.rows, 8u);
    EXPECT_EQ(b.cols, 8u);
  }
}

TEST(Partition, EveryCellCoveredOnce) {
  auto check = [](std::size_t side, std::size_t beta, std::size_t dy, std::size_t dx) {
    std::vector<int> hits(side * side, 0);
    for (const Block& b : partition_blocks(side, beta, dy, dx)) {
      EXPECT_LE(b.rows, beta);
      EXPECT_LE(b.cols, beta);
      EXPECT_LE(b.frame_row + b.rows, beta);
      EXPECT_LE(b.frame_col + b.cols, beta);
      for (std::size_t r = 0; r < b.rows; ++r) {
        for (std::size_t c = 0; c < b.cols; ++c) ++hits[(b.row0 + r) * side + b.col0 + c];
      }
    }
    for (int h : hits) ASSERT_EQ(h, 1) << side << " " << beta << " " << dy << " " << dx;
  };
  check(20, 16, 3, 5);
  for (std::size_t side : {2u, 7u, 16u, 33u}) {
    for (std::size_t beta : {2u, 5u, 16u}) {
      if (beta > side) continue;
      for (std::size_t dy = 0; dy < beta; ++dy) {
        for (std::size_t dx = 0; dx < beta; dx += 3) check(side, beta, dy, dx);
      }
    }
  }
  EXPECT_THROW(partition_blocks(20, 16, 16, 0), Error);
}

TEST(BlockSize, FollowsRadiusWithFloor) {
  EXPECT_EQ(block_size_for_radius(255.0, 16, 512), 256u);
  EXPECT_EQ(block_size_for_radius(31.0, 16, 64), 32u);
  EXPECT_EQ(block_size_for_radius(4.2, 16, 64), 16u);
  EXPECT_EQ(block_size_for_radius(40.0, 16, 20), 20u);
}

TEST(GridDistance, Basics) {
  const FeatureGrid g = test::random_grid(4, 2, 3);
  EXPECT_EQ(grid_distance(g, g), 0.0);
  FeatureGrid one(1, 1, 1.0f), zero(1, 1, 0.0f);
  const double w[1] = {1.0};
  EXPECT_EQ(grid_distance(one, zero, w), 1.0);
  EXPECT_THROW(grid_distance(one, FeatureGrid(2, 1)), Error);
}

TEST(GridDistance, MatchesDirectComputation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const FeatureGrid a = test::random_grid(4, 2, seed);
    const FeatureGrid b = test::random_grid(4, 2, seed + 100);
    double sum = 0.0;
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) {
        const double d0 = double(a.at(r, c, 0)) - b.at(r, c, 0);
        const double d1 = double(a.at(r, c, 1)) - b.at(r, c, 1);
        sum += std::hypot(d0, d1);
      }
    }
    EXPECT_NEAR(grid_distance(a, b), sum / 16.0, 1e-12);
    const double w[2] = {2.0, 0.0};
    double wsum = 0.0;
    for (std::size_t i = 0; i < 16; ++i) wsum += 2.0 * std::abs(double(a.cell(i)[0]) - b.cell(i)[0]);
    EXPECT_NEAR(grid_distance(a, b, w), wsum / 16.0, 1e-12);
  }
}

TEST(Reassign, GroupsReachTheirOptimum) {
  const std::size_t side = 12, beta = 8;
  FeatureGrid grid = test::random_grid(side, 3, 5);
  const FeatureGrid target = blur_target(test::random_grid(side, 3, 6), 3.0);
  Permutation perm(side * side);
  std::iota(perm.begin(), perm.end(), 0u);
  const FeatureGrid before = grid;
  const CostScale scale = CostScale::for_grid(grid);
  CounterRng rng(1);
  const auto grouping = random_permutation(beta * beta, rng);

  for (const Block& block : partition_blocks(side, beta, 3, 6)) {
    const FeatureGrid pre = grid;
    const std::int64_t delta = reassign_block(grid, perm, target, block, grouping, beta, scale);
    EXPECT_LE(delta, 0);

    // Independent regrouping of the block cells in grouping order.
    std::vector<std::size_t> cells;
    for (std::uint32_t f : grouping) {
      const std::size_t fr = f / beta, fc = f % beta;
      if (fr < block.frame_row || fc < block.frame_col) continue;
      const std::size_t r = fr - block.frame_row, c = fc - block.frame_col;
      if (r < block.rows && c < block.cols) cells.push_back((block.row0 + r) * side + block.col0 + c);
    }
    ASSERT_EQ(cells.size(), block.rows * block.cols);
    auto dist = [&](const FeatureGrid& g, std::size_t from, std::size_t to) {
      double s = 0.0;
      for (std::size_t d = 0; d < 3; ++d) {
        const double t = double(g.cell(from)[d]) - target.cell(to)[d];
        s += t * t;
      }
      return std::sqrt(s);
    };
    for (std::size_t at = 0; at < cells.size(); at += 4) {
      const std::size_t m = std::min<std::size_t>(4, cells.size() - at);
      std::array<std::uint8_t, 4> p{0, 1, 2, 3};
      double best = std::numeric_limits<double>::infinity();
      do {
        double c = 0.0;
        for (std::size_t i = 0; i < m; ++i) c += dist(pre, cells[at + i], cells[at + p[i]]);
        best = std::min(best, c);
      } while (std::next_permutation(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(m)));
      double got = 0.0;
      for (std::size_t i = 0; i < m; ++i) got += dist(grid, cells[at + i], cells[at + i]);
      EXPECT_NEAR(got, best, 1e-9);
    }
  }
  EXPECT_TRUE(is_permutation_of_iota(perm));
  EXPECT_EQ(grid, apply_permutation(before, perm));
}

TEST(Sort, ResultIsBijectionAndSeeded) {
  const FeatureGrid f = test::random_grid(32, 3, 8, 0.0f, 255.0f);
  SortConfig cfg;
  cfg.seed = 42;
  const SortResult a = sort_grid(f, cfg);
  const SortResult b = sort_grid(f, cfg);
  EXPECT_TRUE(is_permutation_of_iota(a.permutation));
  EXPECT_EQ(a.permutation, b.permutation);
  EXPECT_EQ(test::sorted_cells(apply_permutation(f, a.permutation)), test::sorted_cells(f));
  cfg.seed = 43;
  EXPECT_NE(sort_grid(f, cfg).permutation, a.permutation);
  EXPECT_GT(a.report.reorders, 0u);
  EXPECT_FALSE(a.report.levels.empty());
}

TEST(Sort, ThreadCountDoesNotChangeResult) {
  const FeatureGrid f = test::random_grid(48, 3, 2, 0.0f, 255.0f);
  SortConfig cfg;
  cfg.seed = 5;
  cfg.threads = 1;
  const Permutation one = sort_grid(f, cfg).permutation;
  for (std::size_t t : {2u, 4u, 16u}) {
    cfg.threads = t;
    EXPECT_EQ(sort_grid(f, cfg).permutation, one) << t << " threads";
  }
}

TEST(Sort, ConstantGridTerminatesUnchanged) {
  const FeatureGrid f(16, 2, 0.75f);
  const SortResult r = sort_grid(f, SortConfig{});
  EXPECT_TRUE(is_permutation_of_iota(r.permutation));
  EXPECT_EQ(apply_permutation(f, r.permutation), f);
  for (const LevelTrace& l : r.report.levels) EXPECT_EQ(l.distance_end, 0.0);
}

TEST(Sort, PassesNeverMoveAwayFromTarget) {
  const FeatureGrid f = test::random_grid(40, 4, 12);
  std::size_t passes = 0;
  const SortResult r = sort_grid(f, SortConfig{}, [&](const PassInfo& info, const FeatureGrid& grid,
                                                      const Permutation& perm,
                                                      const FeatureGrid& target) {
    ++passes;
    EXPECT_LE(info.cost_after, info.cost_before);
    EXPECT_LE(info.distance_after, info.distance_before);
    EXPECT_NEAR(grid_distance(grid, target), info.distance_after, 1e-9);
    EXPECT_EQ(grid, apply_permutation(f, perm));
  });
  EXPECT_EQ(passes, r.report.reorders);
}

// Minimal VAD over all 24 layouts of a 2x2 grid.
double min_vad_2x2(const FeatureGrid& f) {
  std::vector<std::uint32_t> p{0, 1, 2, 3};
  double best = std::numeric_limits<double>::infinity();
  do {
    best = std::min(best, vad(apply_permutation(f, p)));
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

TEST(Sort, TwoByTwoReachesMinimalVad) {
  FeatureGrid f(2, 1);
  f.values = {2.0f, 0.0f, 3.0f, 1.0f};
  const double best = min_vad_2x2(f);
  EXPECT_DOUBLE_EQ(best, 0.25);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    SortConfig cfg;
    cfg.seed = seed;
    const SortResult r = sort_grid(f, cfg);
    ASSERT_TRUE(is_permutation_of_iota(r.permutation));
    EXPECT_DOUBLE_EQ(vad(apply_permutation(f, r.permutation)), best) << "seed " << seed;
  }
}

TEST(Sort, RejectsBadInput) {
  EXPECT_THROW(sort_grid(FeatureGrid(1, 3), SortConfig{}), Error);
  EXPECT_THROW(sort_grid(FeatureGrid(4, 0), SortConfig{}), Error);
  FeatureGrid nan(4, 1);
  nan.values[3] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(sort_grid(nan, SortConfig{}), Error);
  SortConfig bad;
  bad.radius_decay = 1.0;
  EXPECT_THROW(sort_grid(FeatureGrid(4, 1), bad), Error);
  EXPECT_THROW(blur_target(FeatureGrid(4, 1), 0.5), Error);
}

}  // namespace
}  // namespace sogs
