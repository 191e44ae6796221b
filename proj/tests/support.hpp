#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sogs/grid.hpp"
#include "sogs/rng.hpp"
#include "sogs/splat_cloud.hpp"

namespace sogs::test {

double normal(CounterRng& rng);

// Independent draws shaped like trained scenes: positions spread over a few
// tens of units, colors and opacities mostly inside the default clip ranges.
SplatCloud random_cloud(std::size_t n, bool with_sh_rest, std::uint64_t seed);

// Gaussians on a few smooth surfaces whose attributes vary smoothly with
// position, so that neighbors in space look alike.
SplatCloud correlated_cloud(std::size_t n, bool with_sh_rest, std::uint64_t seed);

FeatureGrid random_grid(std::size_t side, std::size_t channels, std::uint64_t seed,
                        float lo = 0.0f, float hi = 1.0f);

// Rows of the grid sorted lexicographically; equal for grids holding the
// same multiset of cells.
std::vector<std::vector<float>> sorted_cells(const FeatureGrid& grid);

// Mean Euclidean distance between corresponding cells under per-channel
// weights, accumulated in long double.
double mean_l2(const FeatureGrid& a, const FeatureGrid& b);

}  // namespace sogs::test

namespace sogs {
struct CompressedBundle;
}

namespace sogs::test {

struct BoundReport {
  bool ok = true;
  double worst_ratio = 0.0;  // largest error / allowed error seen
  std::string worst;         // description of the worst value
};

// Checks every decoded value against the input Gaussian it came from:
// after clamping to the stored range, the error in the quantized domain
// (contracted for positions) must not exceed half a quantization step.
BoundReport check_half_step(const SplatCloud& input, const CompressedBundle& bundle,
                            const SplatCloud& decoded);

}  // namespace sogs::test
