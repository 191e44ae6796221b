#include "sogs/ply.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "sogs/error.hpp"

namespace sogs {
namespace {

static_assert(sizeof(float) == 4);

struct PropertyTarget {
  Attribute attribute;
  std::size_t channel;
};

// Property names in the order write_ply emits them; normals map to nothing.
std::vector<std::string> canonical_properties(bool with_sh_rest) {
  std::vector<std::string> names = {"x", "y", "z", "nx", "ny", "nz",
                                    "f_dc_0", "f_dc_1", "f_dc_2"};
  if (with_sh_rest) {
    for (std::size_t i = 0; i < kShRestChannels; ++i) {
      names.push_back("f_rest_" + std::to_string(i));
    }
  }
  names.emplace_back("opacity");
  for (int i = 0; i < 3; ++i) names.push_back("scale_" + std::to_string(i));
  for (int i = 0; i < 4; ++i) names.push_back("rot_" + std::to_string(i));
  return names;
}

std::optional<std::size_t> indexed(std::string_view name, std::string_view prefix,
                                   std::size_t limit) {
  if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
  const std::string_view digits = name.substr(prefix.size());
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (digits.empty() || ec != std::errc() || p != digits.data() + digits.size() ||
      v >= limit || (digits.size() > 1 && digits[0] == '0')) {
    return std::nullopt;
  }
  return v;
}

// nullopt: unknown; target with channel SIZE_MAX: a normal (ignored).
std::optional<PropertyTarget> classify(std::string_view name) {
  constexpr std::size_t kIgnored = static_cast<std::size_t>(-1);
  if (name == "x") return PropertyTarget{Attribute::kPosition, 0};
  if (name == "y") return PropertyTarget{Attribute::kPosition, 1};
  if (name == "z") return PropertyTarget{Attribute::kPosition, 2};
  if (name == "nx" || name == "ny" || name == "nz") {
    return PropertyTarget{Attribute::kPosition, kIgnored};
  }
  if (name == "opacity") return PropertyTarget{Attribute::kOpacity, 0};
  if (auto i = indexed(name, "f_dc_", 3)) return PropertyTarget{Attribute::kShDc, *i};
  if (auto i = indexed(name, "f_rest_", kShRestChannels)) {
    return PropertyTarget{Attribute::kShRest, *i};
  }
  if (auto i = indexed(name, "scale_", 3)) return PropertyTarget{Attribute::kScale, *i};
  if (auto i = indexed(name, "rot_", 4)) return PropertyTarget{Attribute::kRotation, *i};
  return std::nullopt;
}

[[noreturn]] void fail(std::size_t offset, const std::string& what) {
  throw Error(ErrorCode::kParseError, "byte " + std::to_string(offset) + ": " + what);
}

float load_le_float(const std::uint8_t* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  if constexpr (std::endian::native == std::endian::big) {
    bits = (bits >> 24) | ((bits >> 8) & 0xff00u) | ((bits << 8) & 0xff0000u) | (bits << 24);
  }
  return std::bit_cast<float>(bits);
}

void store_le_float(float v, std::uint8_t* p) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  if constexpr (std::endian::native == std::endian::big) {
    bits = (bits >> 24) | ((bits >> 8) & 0xff00u) | ((bits << 8) & 0xff0000u) | (bits << 24);
  }
  std::memcpy(p, &bits, 4);
}

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) words.push_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

}  // namespace

SplatCloud read_ply(std::span<const std::uint8_t> bytes) {
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  std::size_t pos = 0;
  auto next_line = [&](std::size_t& line_start) -> std::string_view {
    line_start = pos;
    const std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) fail(pos, "unterminated header line");
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    return line;
  };

  std::size_t at = 0;
  if (next_line(at) != "ply") fail(0, "missing 'ply' magic");

  bool saw_format = false;
  std::optional<std::size_t> vertex_count;
  struct Column {
    std::string name;
    std::optional<PropertyTarget> target;
  };
  std::vector<Column> columns;
  for (;;) {
    const std::string_view line = next_line(at);
    const auto words = split_words(line);
    if (words.empty()) fail(at, "empty header line");
    const std::string_view key = words[0];
    if (key == "end_header") break;
    if (key == "comment" || key == "obj_info") continue;
    if (key == "format") {
      if (words.size() != 3 || words[1] != "binary_little_endian" || words[2] != "1.0") {
        fail(at, "only 'format binary_little_endian 1.0' is supported");
      }
      saw_format = true;
    } else if (key == "element") {
      if (words.size() != 3 || words[1] != "vertex" || vertex_count) {
        fail(at, "expected a single 'element vertex <count>'");
      }
      std::size_t n = 0;
      auto [p, ec] = std::from_chars(words[2].data(), words[2].data() + words[2].size(), n);
      if (ec != std::errc() || p != words[2].data() + words[2].size()) {
        fail(at, "bad vertex count '" + std::string(words[2]) + "'");
      }
      vertex_count = n;
    } else if (key == "property") {
      if (!vertex_count) fail(at, "property before element");
      if (words.size() != 3) fail(at, "list properties are not supported");
      if (words[1] != "float" && words[1] != "float32") {
        fail(at, "property '" + std::string(words[2]) + "' must be float");
      }
      const std::string name(words[2]);
      for (const Column& c : columns) {
        if (c.name == name) fail(at, "duplicate property '" + name + "'");
      }
      auto target = classify(name);
      if (!target) fail(at, "unknown property '" + name + "'");
      columns.push_back({name, target});
    } else {
      fail(at, "unexpected header keyword '" + std::string(key) + "'");
    }
  }
  if (!saw_format) fail(0, "missing format line");
  if (!vertex_count) fail(0, "missing vertex element");

  std::size_t rest = 0;
  PerAttribute<std::vector<bool>> seen;
  for (Attribute a : kAllAttributes) seen[a].assign(fixed_channels(a), false);
  for (const Column& c : columns) {
    if (c.target->channel == static_cast<std::size_t>(-1)) continue;
    seen[c.target->attribute][c.target->channel] = true;
    if (c.target->attribute == Attribute::kShRest) ++rest;
  }
  if (rest != 0 && rest != kShRestChannels) {
    fail(pos, "f_rest block must have 0 or 45 properties, found " + std::to_string(rest));
  }
  for (Attribute a : kAllAttributes) {
    if (a == Attribute::kShRest) continue;
    for (std::size_t ch = 0; ch < fixed_channels(a); ++ch) {
      if (!seen[a][ch]) {
        fail(pos, "missing required " + std::string(attribute_name(a)) + " property " +
                      std::to_string(ch));
      }
    }
  }

  const std::size_t n = *vertex_count;
  if (n == 0) fail(pos, "vertex count is 0");
  const std::size_t stride = columns.size() * 4;
  const std::size_t payload = bytes.size() - pos;
  if (n > payload / stride) {
    fail(pos, "truncated payload: " + std::to_string(n) + " vertices need " +
                  std::to_string(static_cast<double>(n) * stride) + " bytes, have " +
                  std::to_string(payload));
  }
  if (n * stride != payload) {
    fail(pos + n * stride, "unexpected trailing bytes after the vertex data");
  }

  SplatCloud cloud(n, rest == kShRestChannels);
  const std::uint8_t* data = bytes.data() + pos;
  for (std::size_t col = 0; col < columns.size(); ++col) {
    const PropertyTarget t = *columns[col].target;
    if (t.channel == static_cast<std::size_t>(-1)) continue;
    auto dst = cloud.values(t.attribute);
    const std::size_t ch = cloud.channels(t.attribute);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t offset = i * stride + col * 4;
      const float v = load_le_float(data + offset);
      if (!std::isfinite(v)) {
        fail(pos + offset, "non-finite value in property '" + columns[col].name +
                               "' of vertex " + std::to_string(i));
      }
      dst[i * ch + t.channel] = v;
    }
  }
  return cloud;
}

std::vector<std::uint8_t> write_ply(const SplatCloud& cloud) {
  cloud.validate();
  const auto names = canonical_properties(cloud.has_sh_rest());
  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.size() << '\n';
  for (const std::string& name : names) header << "property float " << name << '\n';
  header << "end_header\n";
  const std::string h = header.str();

  const std::size_t stride = names.size() * 4;
  std::vector<std::uint8_t> out(h.size() + cloud.size() * stride, 0);
  std::memcpy(out.data(), h.data(), h.size());
  std::uint8_t* data = out.data() + h.size();

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::uint8_t* rec = data + i * stride;
    std::size_t col = 0;
    auto put = [&](std::span<const float> values) {
      for (float v : values) store_le_float(v, rec + 4 * col++);
    };
    put(cloud.row(Attribute::kPosition, i));
    col += 3;  // normals stay zero
    put(cloud.row(Attribute::kShDc, i));
    put(cloud.row(Attribute::kShRest, i));
    put(cloud.row(Attribute::kOpacity, i));
    put(cloud.row(Attribute::kScale, i));
    put(cloud.row(Attribute::kRotation, i));
  }
  return out;
}

SplatCloud read_ply_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return read_ply(bytes);
}

}  // namespace sogs
