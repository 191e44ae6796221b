#include "sogs/metrics.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "sogs/error.hpp"
#include "sogs/rng.hpp"

namespace sogs {

template <class T>
double vad(const Grid<T>& grid) {
  if (grid.side < 2) {
    throw Error(ErrorCode::kInvalidInput, "VAD needs a grid side of at least 2");
  }
  const std::size_t s = grid.side, ch = grid.channels;
  auto for_each_diff = [&](auto&& fn) {
    for (std::size_t r = 0; r < s; ++r) {
      for (std::size_t c = 0; c < s; ++c) {
        for (std::size_t k = 0; k < ch; ++k) {
          const double v = grid.at(r, c, k);
          if (c + 1 < s) fn(std::abs(v - static_cast<double>(grid.at(r, c + 1, k))));
          if (r + 1 < s) fn(std::abs(v - static_cast<double>(grid.at(r + 1, c, k))));
        }
      }
    }
  };
  double sum = 0.0;
  std::size_t count = 0;
  for_each_diff([&](double d) {
    sum += d;
    ++count;
  });
  if (count == 0) return 0.0;
  const double mean = sum / static_cast<double>(count);
  double sq = 0.0;
  for_each_diff([&](double d) { sq += (d - mean) * (d - mean); });
  return sq / static_cast<double>(count);
}

template double vad(const Grid<float>&);
template double vad(const Grid<double>&);

double attribute_psnr(std::span<const float> a, std::span<const float> b, double peak) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidInput, "PSNR inputs differ in size");
  }
  if (!(peak > 0.0)) throw Error(ErrorCode::kInvalidInput, "PSNR peak must be > 0");
  double se = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    se += d * d;
  }
  if (se == 0.0 || a.empty()) return std::numeric_limits<double>::infinity();
  const double mse = se / static_cast<double>(a.size());
  return 10.0 * std::log10(peak * peak / mse);
}

FeatureGrid random_uniform_grid(std::size_t side, std::size_t channels,
                                std::uint64_t seed) {
  CounterRng rng(seed);
  FeatureGrid grid(side, channels);
  for (float& v : grid.values) v = static_cast<float>(rng.uniform() * 255.0);
  return grid;
}

std::vector<BenchRow> bench_sort(std::span<const std::size_t> sides,
                                 std::size_t channels,
                                 std::span<const std::uint64_t> seeds,
                                 const SortConfig& config) {
  for (std::size_t side : sides) {
    if (side < 2) throw Error(ErrorCode::kInvalidInput, "bench sides must be >= 2");
  }
  std::vector<BenchRow> rows;
  for (std::uint64_t seed : seeds) {
    for (std::size_t side : sides) {
      const FeatureGrid grid = random_uniform_grid(side, channels, seed);
      SortConfig trial = config;
      trial.seed = seed;
      const SortResult sorted = sort_grid(grid, trial);
      BenchRow row;
      row.side = side;
      row.channels = channels;
      row.seed = seed;
      row.seconds = sorted.report.seconds;
      row.reorders = sorted.report.reorders;
      row.vad_initial = vad(grid);
      row.vad_final = vad(apply_permutation(grid, sorted.permutation));
      rows.push_back(row);
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << "side,channels,seed,time_s,reorders,vad_initial,vad_final\n";
  for (const BenchRow& r : rows) {
    out << r.side << ',' << r.channels << ',' << r.seed << ',' << r.seconds << ','
        << r.reorders << ',' << r.vad_initial << ',' << r.vad_final << '\n';
  }
}

}  // namespace sogs
