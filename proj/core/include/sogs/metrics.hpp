#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sogs/grid.hpp"
#include "sogs/plas.hpp"

namespace sogs {

// Variance of absolute differences: population variance of |g[p,c] - g[q,c]|
// over every horizontally or vertically adjacent cell pair (each unordered
// pair once) and every channel. Throws for side < 2.
template <class T>
double vad(const Grid<T>& grid);

extern template double vad(const Grid<float>&);
extern template double vad(const Grid<double>&);

// 10 log10(peak^2 / MSE) in dB; +infinity when a == b.
double attribute_psnr(std::span<const float> a, std::span<const float> b, double peak);

struct BenchRow {
  std::size_t side = 0;
  std::size_t channels = 0;
  std::uint64_t seed = 0;
  double seconds = 0.0;
  std::size_t reorders = 0;
  double vad_initial = 0.0;
  double vad_final = 0.0;
};

// Grid of i.i.d. uniform values in [0, 255), drawn from CounterRng(seed).
FeatureGrid random_uniform_grid(std::size_t side, std::size_t channels,
                                std::uint64_t seed);

// For each seed and each side: sorts random_uniform_grid(side, channels,
// seed) with `config` (its seed replaced by the trial seed). Trials run
// sequentially.
std::vector<BenchRow> bench_sort(std::span<const std::size_t> sides,
                                 std::size_t channels,
                                 std::span<const std::uint64_t> seeds,
                                 const SortConfig& config);

// CSV with header side,channels,seed,time_s,reorders,vad_initial,vad_final.
void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);

}  // namespace sogs
