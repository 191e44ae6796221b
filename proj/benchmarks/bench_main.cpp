#include <benchmark/benchmark.h>

#include "sogs/blur.hpp"
#include "sogs/bundle.hpp"
#include "sogs/image_codec.hpp"
#include "sogs/metrics.hpp"
#include "sogs/plas.hpp"
#include "sogs/rng.hpp"

namespace {

void BM_SortGrid(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const sogs::FeatureGrid grid = sogs::random_uniform_grid(side, 3, 1);
  std::size_t reorders = 0;
  double final_vad = 0.0;
  for (auto _ : state) {
    const sogs::SortResult r = sogs::sort_grid(grid, sogs::SortConfig{});
    reorders = r.report.reorders;
    final_vad = sogs::vad(sogs::apply_permutation(grid, r.permutation));
    benchmark::DoNotOptimize(r.permutation.data());
  }
  state.counters["reorders"] = static_cast<double>(reorders);
  state.counters["vad"] = final_vad;
}
BENCHMARK(BM_SortGrid)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_BlurTarget(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const sogs::FeatureGrid grid = sogs::random_uniform_grid(side, 3, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sogs::blur_target(grid, side / 2.0 - 1.0).values.data());
  }
}
BENCHMARK(BM_BlurTarget)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_PngEncode16(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  sogs::ImagePlane plane{side, side, 3, 16, {}};
  sogs::CounterRng rng(3);
  plane.samples.resize(side * side * 3);
  for (auto& s : plane.samples) s = static_cast<std::uint16_t>(rng.below(1u << 14));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sogs::encode_plane(plane, "png").data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * plane.samples.size() * 2));
}
BENCHMARK(BM_PngEncode16)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Compress(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  sogs::SplatCloud cloud(n, true);
  sogs::CounterRng rng(4);
  for (sogs::Attribute a : sogs::kAllAttributes) {
    for (float& v : cloud.values(a)) v = static_cast<float>(rng.uniform() * 2.0 - 1.0);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(sogs::compress(cloud, sogs::CompressOptions{}).bytes.data());
  }
}
BENCHMARK(BM_Compress)->Arg(4096)->Arg(16384)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
