#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sogs/bundle.hpp"
#include "sogs/quantize.hpp"

namespace sogs::test {

double normal(CounterRng& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SplatCloud random_cloud(std::size_t n, bool with_sh_rest, std::uint64_t seed) {
  CounterRng rng(seed);
  SplatCloud cloud(n, with_sh_rest);
  auto fill = [&](Attribute a, double mean, double sd) {
    for (float& v : cloud.values(a)) v = static_cast<float>(mean + sd * normal(rng));
  };
  fill(Attribute::kPosition, 0.0, 8.0);
  fill(Attribute::kShDc, 0.8, 0.8);
  fill(Attribute::kShRest, 0.0, 0.25);
  fill(Attribute::kOpacity, 2.0, 2.5);
  fill(Attribute::kScale, -4.0, 1.0);
  fill(Attribute::kRotation, 0.3, 0.35);
  return cloud;
}

SplatCloud correlated_cloud(std::size_t n, bool with_sh_rest, std::uint64_t seed) {
  CounterRng rng(seed);
  SplatCloud cloud(n, with_sh_rest);
  constexpr std::size_t kSurfaces = 3;
  double offsets[kSurfaces][3];
  for (auto& o : offsets) {
    for (double& v : o) v = 10.0 * (rng.uniform() - 0.5);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s = rng.below(kSurfaces);
    const double u = rng.uniform() * 2.0 - 1.0;
    const double v = rng.uniform() * 2.0 - 1.0;
    const double x = offsets[s][0] + 4.0 * u;
    const double y = offsets[s][1] + 4.0 * v;
    const double z = offsets[s][2] + std::sin(2.0 * u) * std::cos(1.5 * v);
    const float pos[3] = {static_cast<float>(x), static_cast<float>(y), static_cast<float>(z)};
    std::copy(pos, pos + 3, cloud.row(Attribute::kPosition, i).begin());

    auto dc = cloud.row(Attribute::kShDc, i);
    dc[0] = static_cast<float>(1.0 + 1.2 * std::sin(0.4 * x + s));
    dc[1] = static_cast<float>(1.0 + 1.2 * std::cos(0.3 * y));
    dc[2] = static_cast<float>(0.5 + 0.8 * std::sin(0.2 * (x + y)) + 0.5 * z);
    if (with_sh_rest) {
      auto rest = cloud.row(Attribute::kShRest, i);
      // Coefficient k of each color belongs to band 1 (k < 3), 2 (k < 8) or 3.
      for (std::size_t k = 0; k < rest.size(); ++k) {
        const std::size_t j = k % 15;
        const double amplitude = j < 3 ? 0.1 : j < 8 ? 0.05 : 0.03;
        rest[k] = static_cast<float>(amplitude * std::sin(0.3 * x + 0.2 * y + 0.7 * k));
      }
    }
    cloud.row(Attribute::kOpacity, i)[0] = static_cast<float>(3.0 + 2.0 * std::cos(0.25 * x * y / 4.0));
    auto sc = cloud.row(Attribute::kScale, i);
    for (std::size_t k = 0; k < 3; ++k) {
      sc[k] = static_cast<float>(-4.0 + 0.5 * std::sin(0.3 * x + k) + 0.3 * z);
    }
    auto rot = cloud.row(Attribute::kRotation, i);
    rot[0] = static_cast<float>(0.8 + 0.2 * std::cos(0.2 * x));
    rot[1] = static_cast<float>(0.3 * std::sin(0.2 * y));
    rot[2] = static_cast<float>(0.3 * std::cos(0.25 * (x - y)));
    rot[3] = static_cast<float>(0.2 * std::sin(0.5 * z));
  }
  return cloud;
}

FeatureGrid random_grid(std::size_t side, std::size_t channels, std::uint64_t seed, float lo,
                        float hi) {
  CounterRng rng(seed);
  FeatureGrid g(side, channels);
  for (float& v : g.values) v = static_cast<float>(lo + (hi - lo) * rng.uniform());
  return g;
}

std::vector<std::vector<float>> sorted_cells(const FeatureGrid& grid) {
  std::vector<std::vector<float>> rows;
  rows.reserve(grid.cells());
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    const auto c = grid.cell(i);
    rows.emplace_back(c.begin(), c.end());
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

double mean_l2(const FeatureGrid& a, const FeatureGrid& b) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < a.cells(); ++i) {
    long double d2 = 0.0L;
    for (std::size_t ch = 0; ch < a.channels; ++ch) {
      const long double d = static_cast<long double>(a.cell(i)[ch]) - b.cell(i)[ch];
      d2 += d * d;
    }
    total += std::sqrt(d2);
  }
  return static_cast<double>(total / static_cast<long double>(a.cells()));
}

BoundReport check_half_step(const SplatCloud& input, const CompressedBundle& bundle,
                            const SplatCloud& decoded) {
  BoundReport report;
  if (decoded.size() != bundle.source_index.size()) {
    report.ok = false;
    report.worst = "size mismatch";
    return report;
  }
  for (const StoredAttribute& s : bundle.manifest.attributes) {
    const Attribute a = s.attribute;
    for (std::size_t c = 0; c < s.channels; ++c) {
      const ValueRange range = s.quantized_range(c);
      // Decoded values are stored as float; allow for that rounding.
      const double allowed = half_step(range, s.levels) +
                             1e-6 * std::max({1.0, std::abs(range.min), std::abs(range.max)});
      for (std::size_t i = 0; i < decoded.size(); ++i) {
        const double orig = input.row(a, bundle.source_index[i])[c];
        const double clamped = std::clamp(orig, s.min[c], s.max[c]);
        const double got = decoded.row(a, i)[c];
        const double want_q = s.contracted ? contract(clamped) : clamped;
        const double got_q = s.contracted ? contract(got) : got;
        const double ratio = std::abs(got_q - want_q) / allowed;
        if (ratio > report.worst_ratio) {
          report.worst_ratio = ratio;
          std::ostringstream os;
          os << attribute_name(a) << "[" << c << "] cell " << i << ": " << orig << " -> " << got;
          report.worst = os.str();
        }
        if (ratio > 1.0) report.ok = false;
      }
    }
  }
  return report;
}

}  // namespace sogs::test
