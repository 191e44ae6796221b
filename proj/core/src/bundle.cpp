#include "sogs/bundle.hpp"

#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>

#include "json.hpp"
#include "parallel.hpp"
#include "sogs/error.hpp"
#include "sogs/image_codec.hpp"
#include "sogs/rng.hpp"
#include "sogs/zip_archive.hpp"

namespace sogs {
namespace {

using nlohmann::json;

[[noreturn]] void bad_bundle(const std::string& what) {
  throw Error(ErrorCode::kDecodeError, what);
}

std::string file_name(Attribute a, std::size_t index, std::size_t count,
                      std::string_view ext) {
  std::ostringstream name;
  name << attribute_name(a);
  if (count > 1) {
    name << '_';
    if (count > 10) name << std::setw(2) << std::setfill('0');
    name << index;
  }
  name << '.' << ext;
  return name.str();
}

double to_stored_domain(const StoredAttribute& s, float v) {
  return s.contracted ? contract(static_cast<double>(v)) : static_cast<double>(v);
}

float from_stored_domain(const StoredAttribute& s, double v) {
  return static_cast<float>(s.contracted ? expand(v) : v);
}

json weights_to_json(const AttributeWeights& w) {
  json j = json::object();
  for (Attribute a : kAllAttributes) j[std::string(attribute_name(a))] = w[a];
  return j;
}

json manifest_to_json(const BundleManifest& m) {
  json j;
  j["format"] = m.format;
  j["side"] = m.side;
  j["count"] = m.side * m.side;
  j["source_count"] = m.source_count;
  j["sh_degree"] = m.sh_degree;
  j["sort"] = {{"enabled", m.sorted},
               {"seed", m.sort.seed},
               {"improvement_threshold", m.sort.improvement_threshold},
               {"radius_decay", m.sort.radius_decay},
               {"min_block_size", m.sort.min_block_size},
               {"weights", weights_to_json(m.sort_weights)}};
  json attrs = json::object();
  for (const StoredAttribute& s : m.attributes) {
    attrs[std::string(attribute_name(s.attribute))] = {
        {"channels", s.channels},
        {"levels", s.levels},
        {"bit_depth", s.bit_depth},
        {"range", s.mode == RangeMode::kFixed ? "fixed" : "data"},
        {"transform", s.contracted ? "contract" : "none"},
        {"codec", s.codec},
        {"quality", s.quality},
        {"min", s.min},
        {"max", s.max},
        {"files", s.files},
        {"file_channels", s.file_channels}};
  }
  j["attributes"] = attrs;
  return j;
}

BundleManifest manifest_from_json(const json& j) {
  BundleManifest m;
  m.format = j.at("format").get<std::string>();
  if (m.format != kBundleFormat) {
    bad_bundle("unsupported bundle format '" + m.format + "', expected '" +
               std::string(kBundleFormat) + "'");
  }
  m.side = j.at("side").get<std::size_t>();
  m.source_count = j.at("source_count").get<std::size_t>();
  m.sh_degree = j.at("sh_degree").get<int>();
  if (m.side == 0 || m.side > 65535) bad_bundle("manifest: invalid grid side");
  if (j.at("count").get<std::size_t>() != m.side * m.side) {
    bad_bundle("manifest: count does not match side");
  }
  if (m.sh_degree != 0 && m.sh_degree != 3) bad_bundle("manifest: sh_degree must be 0 or 3");
  const json& sort = j.at("sort");
  m.sorted = sort.at("enabled").get<bool>();
  m.sort.seed = sort.at("seed").get<std::uint64_t>();
  m.sort.improvement_threshold = sort.at("improvement_threshold").get<double>();
  m.sort.radius_decay = sort.at("radius_decay").get<double>();
  m.sort.min_block_size = sort.at("min_block_size").get<std::size_t>();
  for (Attribute a : kAllAttributes) {
    m.sort_weights[a] = sort.at("weights").at(std::string(attribute_name(a))).get<double>();
  }

  const json& attrs = j.at("attributes");
  for (auto it = attrs.begin(); it != attrs.end(); ++it) {
    if (!parse_attribute(it.key())) bad_bundle("manifest: unknown attribute '" + it.key() + "'");
  }
  for (Attribute a : kAllAttributes) {
    const std::string name(attribute_name(a));
    const bool expected = a != Attribute::kShRest || m.sh_degree == 3;
    if (!attrs.contains(name)) {
      if (expected) bad_bundle("manifest: missing attribute '" + name + "'");
      continue;
    }
    if (!expected) bad_bundle("manifest: sh_rest present in a degree-0 bundle");
    const json& e = attrs.at(name);
    StoredAttribute s;
    s.attribute = a;
    s.channels = e.at("channels").get<std::size_t>();
    s.levels = e.at("levels").get<std::uint32_t>();
    s.bit_depth = e.at("bit_depth").get<int>();
    s.mode = e.at("range").get<std::string>() == "fixed" ? RangeMode::kFixed
                                                         : RangeMode::kDataDriven;
    s.contracted = e.at("transform").get<std::string>() == "contract";
    s.codec = e.at("codec").get<std::string>();
    s.quality = e.at("quality").get<int>();
    s.min = e.at("min").get<std::vector<double>>();
    s.max = e.at("max").get<std::vector<double>>();
    s.files = e.at("files").get<std::vector<std::string>>();
    s.file_channels = e.at("file_channels").get<std::vector<std::vector<std::size_t>>>();

    const std::size_t want = a == Attribute::kShRest ? kShRestChannels : fixed_channels(a);
    if (s.channels != want || s.min.size() != want || s.max.size() != want) {
      bad_bundle("manifest: " + name + " has the wrong channel count");
    }
    if (s.levels < 2 || s.levels > 65536 || (s.bit_depth != 8 && s.bit_depth != 16) ||
        s.levels - 1 > (s.bit_depth == 16 ? 0xffffu : 0xffu)) {
      bad_bundle("manifest: " + name + " has inconsistent levels/bit depth");
    }
    if (s.files.empty() || s.files.size() != s.file_channels.size()) {
      bad_bundle("manifest: " + name + " file list is malformed");
    }
    std::vector<int> covered(want, 0);
    for (const auto& chs : s.file_channels) {
      for (std::size_t c : chs) {
        if (c >= want) bad_bundle("manifest: " + name + " references a missing channel");
        ++covered[c];
      }
    }
    if (std::any_of(covered.begin(), covered.end(), [](int n) { return n != 1; })) {
      bad_bundle("manifest: " + name + " channels are not covered exactly once");
    }
    for (std::size_t c = 0; c < want; ++c) {
      if (!std::isfinite(s.min[c]) || !std::isfinite(s.max[c]) || s.min[c] > s.max[c]) {
        bad_bundle("manifest: " + name + " has an invalid range");
      }
    }
    m.attributes.push_back(std::move(s));
  }
  return m;
}

BundleManifest parse_manifest_entry(const std::vector<ZipEntry>& entries) {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [](const ZipEntry& e) { return e.name == kManifestName; });
  if (it == entries.end()) bad_bundle("bundle has no manifest.json");
  try {
    return manifest_from_json(json::parse(it->data.begin(), it->data.end()));
  } catch (const json::exception& e) {
    bad_bundle(std::string("manifest: ") + e.what());
  }
}

}  // namespace

ValueRange StoredAttribute::quantized_range(std::size_t channel) const {
  double lo = min.at(channel);
  double hi = max.at(channel);
  if (contracted) {
    lo = contract(lo);
    hi = contract(hi);
  }
  if (!(lo < hi)) hi = lo + 1.0;
  return {lo, hi};
}

const StoredAttribute& BundleManifest::attribute(Attribute a) const {
  for (const StoredAttribute& s : attributes) {
    if (s.attribute == a) return s;
  }
  throw Error(ErrorCode::kInvalidInput,
              "bundle has no " + std::string(attribute_name(a)) + " attribute");
}

std::vector<std::vector<std::size_t>> plane_groups(Attribute a, std::size_t channels) {
  std::vector<std::vector<std::size_t>> groups;
  if (channels == 0) return groups;
  switch (a) {
    case Attribute::kRotation:
      for (std::size_t c = 0; c < channels; ++c) groups.push_back({c});
      break;
    case Attribute::kShRest: {
      const std::size_t per_color = channels / 3;
      for (std::size_t k = 0; k < per_color; ++k) {
        groups.push_back({k, per_color + k, 2 * per_color + k});
      }
      break;
    }
    default: {
      std::vector<std::size_t> all(channels);
      for (std::size_t c = 0; c < channels; ++c) all[c] = c;
      groups.push_back(all);
    }
  }
  return groups;
}

CompressedBundle compress(const SplatCloud& input, const CompressOptions& options) {
  input.validate();
  if (input.size() < 4) {
    throw Error(ErrorCode::kInvalidInput, "compression needs at least 4 Gaussians");
  }
  options.quant.validate();
  options.sort.validate();

  const SplatCloud cloud = options.keep_sh_rest ? input : input.without_sh_rest();
  const GridLayout layout = build_grid_layout(cloud.size());
  const std::vector<std::uint32_t> survivors = prune_survivors(cloud, layout);
  const SplatCloud pruned = cloud.gather(survivors);

  CompressedBundle result;
  BundleManifest& manifest = result.manifest;
  manifest.format = std::string(kBundleFormat);
  manifest.side = layout.side;
  manifest.sh_degree = cloud.sh_degree();
  manifest.source_count = input.size();
  manifest.sort = options.sort;
  manifest.sort_weights = options.sort_weights;

  // Validate codecs before spending time on the sort.
  for (Attribute a : kAllAttributes) {
    if (pruned.channels(a) == 0) continue;
    const AttributeQuant& q = options.quant.attributes[a];
    const ImageCodec& codec = find_codec(q.codec);
    const int depth = q.levels > 256 ? 16 : 8;
    if (!codec.capabilities().lossless && a != Attribute::kShDc) {
      throw Error(ErrorCode::kUnsupportedCodec,
                  "lossy codec '" + q.codec + "' is only allowed for sh_dc, not " +
                      std::string(attribute_name(a)));
    }
    for (const auto& group : plane_groups(a, pruned.channels(a))) {
      if (!codec.supports(depth, group.size())) {
        throw Error(ErrorCode::kUnsupportedCodec,
                    "codec '" + q.codec + "' cannot store " + std::to_string(depth) +
                        "-bit " + std::string(attribute_name(a)) + " planes with " +
                        std::to_string(group.size()) + " channels");
      }
    }
  }

  Permutation perm;
  SortFeatures features;
  if (options.sort_enabled) features = normalize_for_sorting(pruned, options.sort_weights);
  manifest.sorted = options.sort_enabled && features.grid.channels > 0 && layout.side >= 2;
  if (manifest.sorted) {
    SortResult sorted = sort_grid(features.grid, options.sort);
    perm = std::move(sorted.permutation);
    result.sort_report = std::move(sorted.report);
  } else {
    CounterRng rng(options.sort.seed);
    perm = random_permutation(layout.cells(), rng);
  }
  result.source_index.resize(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) result.source_index[i] = survivors[perm[i]];

  const GridStack stack = make_grid_stack(pruned, perm);
  const std::size_t cells = layout.cells();

  struct PendingImage {
    std::string name;
    std::string codec;
    int quality = 100;
    ImagePlane plane;
    std::vector<std::uint8_t> encoded;
  };
  std::vector<PendingImage> images;

  for (Attribute a : kAllAttributes) {
    const std::size_t ch = stack.channels(a);
    if (ch == 0) continue;
    const AttributeQuant& q = options.quant.attributes[a];
    const ImageCodec& codec = find_codec(q.codec);
    const auto plane = stack.plane(a);

    StoredAttribute s;
    s.attribute = a;
    s.channels = ch;
    s.levels = q.levels;
    s.bit_depth = q.levels > 256 ? 16 : 8;
    s.mode = q.mode;
    s.contracted = a == Attribute::kPosition;
    s.codec = q.codec;
    s.quality = q.quality;
    s.min.assign(ch, q.clip_min);
    s.max.assign(ch, q.clip_max);
    if (q.mode == RangeMode::kDataDriven) {
      for (std::size_t c = 0; c < ch; ++c) {
        float lo = plane[c], hi = plane[c];
        for (std::size_t i = 0; i < cells; ++i) {
          lo = std::min(lo, plane[i * ch + c]);
          hi = std::max(hi, plane[i * ch + c]);
        }
        s.min[c] = lo;
        s.max[c] = hi;
      }
    }

    const auto groups = plane_groups(a, ch);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      PendingImage img;
      img.name = file_name(a, g, groups.size(), codec.extension());
      img.codec = q.codec;
      img.quality = q.quality;
      img.plane.width = img.plane.height = layout.side;
      img.plane.channels = groups[g].size();
      img.plane.bit_depth = s.bit_depth;
      img.plane.samples.resize(cells * groups[g].size());
      for (std::size_t k = 0; k < groups[g].size(); ++k) {
        const std::size_t c = groups[g][k];
        const ValueRange range = s.quantized_range(c);
        for (std::size_t i = 0; i < cells; ++i) {
          img.plane.samples[i * groups[g].size() + k] = static_cast<std::uint16_t>(
              quantize(to_stored_domain(s, plane[i * ch + c]), range, q.levels));
        }
      }
      s.files.push_back(img.name);
      s.file_channels.push_back(groups[g]);
      images.push_back(std::move(img));
    }
    manifest.attributes.push_back(std::move(s));
  }

  detail::run_with_workers(options.sort.threads, [&] {
    tbb::parallel_for(std::size_t{0}, images.size(), [&](std::size_t i) {
      images[i].encoded = encode_plane(images[i].plane, images[i].codec, images[i].quality);
    });
  });

  std::vector<ZipEntry> entries;
  const std::string manifest_text = manifest_to_json(manifest).dump(1) + "\n";
  entries.push_back({std::string(kManifestName),
                     std::vector<std::uint8_t>(manifest_text.begin(), manifest_text.end())});
  for (PendingImage& img : images) entries.push_back({img.name, std::move(img.encoded)});
  for (const ZipEntry& e : entries) result.entries.push_back({e.name, e.data.size()});
  result.bytes = write_zip(entries);
  return result;
}

BundleManifest read_manifest(std::span<const std::uint8_t> bundle) {
  return parse_manifest_entry(read_zip(bundle));
}

SplatCloud decompress(std::span<const std::uint8_t> bytes) {
  const std::vector<ZipEntry> entries = read_zip(bytes);
  const BundleManifest manifest = parse_manifest_entry(entries);
  const std::size_t side = manifest.side;
  const std::size_t cells = side * side;

  SplatCloud cloud(cells, manifest.sh_degree == 3);
  for (const StoredAttribute& s : manifest.attributes) {
    const std::string attr(attribute_name(s.attribute));
    bool lossy = false;
    try {
      lossy = !find_codec(s.codec).capabilities().lossless;
    } catch (const Error& e) {
      bad_bundle("attribute " + attr + ": " + e.what());
    }
    auto values = cloud.values(s.attribute);
    for (std::size_t f = 0; f < s.files.size(); ++f) {
      const std::string& name = s.files[f];
      const auto& chans = s.file_channels[f];
      auto it = std::find_if(entries.begin(), entries.end(),
                             [&](const ZipEntry& e) { return e.name == name; });
      if (it == entries.end()) bad_bundle("plane " + name + " (" + attr + ") is missing");
      ImagePlane plane;
      try {
        plane = decode_plane(it->data, s.codec);
      } catch (const Error& e) {
        bad_bundle("plane " + name + " (" + attr + "): " + e.what());
      }
      if (plane.width != side || plane.height != side || plane.channels != chans.size() ||
          plane.bit_depth != s.bit_depth) {
        bad_bundle("plane " + name + " (" + attr + ") has unexpected dimensions");
      }
      for (std::size_t k = 0; k < chans.size(); ++k) {
        const std::size_t c = chans[k];
        const ValueRange range = s.quantized_range(c);
        for (std::size_t i = 0; i < cells; ++i) {
          std::uint32_t index = plane.samples[i * chans.size() + k];
          if (index >= s.levels) {
            if (!lossy) {
              bad_bundle("plane " + name + " (" + attr + ") holds index " +
                         std::to_string(index) + " beyond " + std::to_string(s.levels) +
                         " levels");
            }
            index = s.levels - 1;
          }
          try {
            values[i * s.channels + c] =
                from_stored_domain(s, dequantize(index, range, s.levels));
          } catch (const Error& e) {
            bad_bundle("plane " + name + " (" + attr + "): " + e.what());
          }
        }
      }
    }
  }
  for (Attribute a : kAllAttributes) {
    for (float v : cloud.values(a)) {
      if (!std::isfinite(v)) {
        bad_bundle("plane " + std::string(attribute_name(a)) + " decodes to non-finite values");
      }
    }
  }
  return cloud;
}

}  // namespace sogs
