#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "sogs/metrics.hpp"
#include "sogs/plas.hpp"

namespace sogs {
namespace {

TEST(Vad, HandExamples) {
  EXPECT_EQ(vad(FeatureGrid(5, 3, 2.0f)), 0.0);
  FeatureGrid g(2, 1);
  g.values = {0.0f, 1.0f, 2.0f, 3.0f};
  EXPECT_DOUBLE_EQ(vad(g), 0.25);
}

TEST(Vad, ShuffledUniformMatchesClosedForm) {
  const double expected = 255.0 * 255.0 / 6.0 - (255.0 / 3.0) * (255.0 / 3.0);
  EXPECT_DOUBLE_EQ(expected, 3612.5);
  const double v = vad(random_uniform_grid(512, 3, 0));
  EXPECT_NEAR(v, expected, 0.02 * expected);
}

TEST(Vad, MovingNothingChangesNothing) {
  const FeatureGrid g = random_uniform_grid(16, 3, 4);
  std::vector<std::uint32_t> id(g.cells());
  for (std::uint32_t i = 0; i < id.size(); ++i) id[i] = i;
  EXPECT_EQ(vad(apply_permutation(g, id)), vad(g));
}

TEST(Psnr, Examples) {
  const std::vector<float> a{0.0f, 1.0f, 0.5f, 0.25f};
  EXPECT_EQ(attribute_psnr(a, a, 1.0), std::numeric_limits<double>::infinity());
  const std::vector<float> z{0, 0, 0, 0}, one{1, 1, 1, 1};
  EXPECT_NEAR(attribute_psnr(z, one, 1.0), 0.0, 1e-12);
  const std::vector<float> half{0.5f, 0.5f, 0.5f, 0.5f};
  EXPECT_NEAR(attribute_psnr(z, half, 1.0), 6.0206, 1e-4);
}

TEST(Bench, RowsPerSeedAndCsvShape) {
  const std::vector<std::size_t> sides{64, 128, 256};
  const std::vector<std::uint64_t> seeds{7};
  const auto rows = bench_sort(sides, 3, seeds, SortConfig{});
  ASSERT_EQ(rows.size(), 3u);
  for (const BenchRow& r : rows) {
    EXPECT_NEAR(r.vad_initial, 3612.5, 0.05 * 3612.5);
    EXPECT_LT(r.vad_final, 0.01 * r.vad_initial) << "side " << r.side << " final " << r.vad_final;
    EXPECT_GT(r.reorders, 0u);
    EXPECT_GT(r.seconds, 0.0);
  }
  std::ostringstream csv;
  write_bench_csv(csv, rows);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "side,channels,seed,time_s,reorders,vad_initial,vad_final");
  int n = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
    ++n;
  }
  EXPECT_EQ(n, 3);
}

}  // namespace
}  // namespace sogs
