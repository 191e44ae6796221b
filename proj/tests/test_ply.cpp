#include <gtest/gtest.h>

#include <cstring>
#include <string>

#include "sogs/error.hpp"
#include "sogs/ply.hpp"
#include "support.hpp"

namespace sogs {
namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

std::string header(std::size_t n, bool rest, const std::string& extra = "") {
  std::string h = "ply\nformat binary_little_endian 1.0\n" + extra + "element vertex " +
                  std::to_string(n) + "\n";
  for (const char* p : {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"}) {
    h += std::string("property float ") + p + "\n";
  }
  if (rest) {
    for (int i = 0; i < 45; ++i) h += "property float f_rest_" + std::to_string(i) + "\n";
  }
  h += "property float opacity\n";
  for (int i = 0; i < 3; ++i) h += "property float scale_" + std::to_string(i) + "\n";
  for (int i = 0; i < 4; ++i) h += "property float rot_" + std::to_string(i) + "\n";
  return h + "end_header\n";
}

ErrorCode code_of(const std::vector<std::uint8_t>& bytes) {
  try {
    read_ply(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;  // no error: never what the callers expect
}

TEST(Ply, MinimalZeroVertex) {
  std::vector<std::uint8_t> f = bytes_of(header(1, false));
  f.resize(f.size() + 17 * 4, 0);
  const SplatCloud c = read_ply(f);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_FALSE(c.has_sh_rest());
  EXPECT_EQ(c.row(Attribute::kOpacity, 0)[0], 0.0f);
}

TEST(Ply, WriterEncodesLittleEndianFloats) {
  SplatCloud c(1, false);
  const float pos[3] = {1.0f, 2.0f, 3.0f};
  std::copy(pos, pos + 3, c.row(Attribute::kPosition, 0).begin());
  const auto bytes = write_ply(c);
  const std::string h = header(1, false);
  ASSERT_EQ(bytes.size(), h.size() + 17 * 4);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(h.size())), h);
  const std::uint8_t one[4] = {0x00, 0x00, 0x80, 0x3f};
  const std::uint8_t two[4] = {0x00, 0x00, 0x00, 0x40};
  const std::uint8_t three[4] = {0x00, 0x00, 0x40, 0x40};
  EXPECT_EQ(std::memcmp(bytes.data() + h.size(), one, 4), 0);
  EXPECT_EQ(std::memcmp(bytes.data() + h.size() + 4, two, 4), 0);
  EXPECT_EQ(std::memcmp(bytes.data() + h.size() + 8, three, 4), 0);
}

TEST(Ply, RoundTripIsExact) {
  for (bool rest : {true, false}) {
    const SplatCloud c = test::random_cloud(1000, rest, rest ? 1 : 2);
    const auto bytes = write_ply(c);
    const SplatCloud back = read_ply(bytes);
    EXPECT_EQ(back, c);
    EXPECT_EQ(write_ply(back), bytes);
  }
}

TEST(Ply, NoRestBlockMeansDegreeZero) {
  const SplatCloud c = test::random_cloud(5, false, 3);
  const auto bytes = write_ply(c);
  EXPECT_EQ(std::string(bytes.begin(), bytes.end()).find("f_rest"), std::string::npos);
  EXPECT_EQ(read_ply(bytes).sh_degree(), 0);
}

TEST(Ply, ForeignOrderAndCommentsAccepted) {
  const SplatCloud c = test::random_cloud(3, false, 4);
  // Same properties, reversed, without normals.
  std::string h = "ply\nformat binary_little_endian 1.0\ncomment from a trainer\nelement vertex 3\n";
  const char* names[] = {"rot_3", "rot_2", "rot_1", "rot_0", "scale_2", "scale_1", "scale_0",
                         "opacity", "f_dc_2", "f_dc_1", "f_dc_0", "z", "y", "x"};
  for (const char* n : names) h += std::string("property float ") + n + "\n";
  h += "end_header\n";
  std::vector<std::uint8_t> f = bytes_of(h);
  auto push = [&](float v) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
    f.insert(f.end(), p, p + 4);
  };
  for (std::size_t i = 0; i < 3; ++i) {
    for (int k = 3; k >= 0; --k) push(c.row(Attribute::kRotation, i)[k]);
    for (int k = 2; k >= 0; --k) push(c.row(Attribute::kScale, i)[k]);
    push(c.row(Attribute::kOpacity, i)[0]);
    for (int k = 2; k >= 0; --k) push(c.row(Attribute::kShDc, i)[k]);
    for (int k = 2; k >= 0; --k) push(c.row(Attribute::kPosition, i)[k]);
  }
  EXPECT_EQ(read_ply(f), c);
}

TEST(Ply, RejectsMalformedFiles) {
  const auto good = write_ply(test::random_cloud(4, true, 5));
  std::vector<std::uint8_t> truncated(good.begin(), good.end() - 3);
  EXPECT_EQ(code_of(truncated), ErrorCode::kParseError);
  std::vector<std::uint8_t> trailing = good;
  trailing.push_back(0);
  EXPECT_EQ(code_of(trailing), ErrorCode::kParseError);

  EXPECT_EQ(code_of(bytes_of("plx\n")), ErrorCode::kParseError);
  EXPECT_EQ(code_of(bytes_of(header(0, false))), ErrorCode::kParseError);

  std::string ascii = header(1, false);
  ascii.replace(ascii.find("binary_little_endian"), 20, "ascii");
  EXPECT_EQ(code_of(bytes_of(ascii)), ErrorCode::kParseError);

  std::string partial_rest = header(1, false);
  partial_rest.insert(partial_rest.find("property float opacity"), "property float f_rest_0\n");
  EXPECT_EQ(code_of(bytes_of(partial_rest)), ErrorCode::kParseError);

  std::string unknown = header(1, false);
  unknown.insert(unknown.find("end_header"), "property float red\n");
  EXPECT_EQ(code_of(bytes_of(unknown)), ErrorCode::kParseError);

  std::string missing = header(1, false);
  missing.erase(missing.find("property float scale_1\n"), 23);
  EXPECT_EQ(code_of(bytes_of(missing)), ErrorCode::kParseError);

  std::string dbl = header(1, false);
  dbl.replace(dbl.find("property float x"), 16, "property double x");
  EXPECT_EQ(code_of(bytes_of(dbl)), ErrorCode::kParseError);

  std::vector<std::uint8_t> huge = bytes_of(header(1, false));
  const std::string count = "element vertex 1";
  const std::string big = "element vertex 4611686018427387904";
  std::string h = header(1, false);
  h.replace(h.find(count), count.size(), big);
  EXPECT_EQ(code_of(bytes_of(h)), ErrorCode::kParseError);

  std::vector<std::uint8_t> nan = write_ply(test::random_cloud(2, false, 6));
  const float q = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan.data() + nan.size() - 4, &q, 4);
  EXPECT_EQ(code_of(nan), ErrorCode::kParseError);
}

TEST(Ply, WriterRejectsEmptyCloud) { EXPECT_THROW(write_ply(SplatCloud{}), Error); }

// Random corruption must end in a clean parse-error or a valid cloud.
TEST(Ply, FuzzedHeadersNeverCrash) {
  const auto good = write_ply(test::random_cloud(3, true, 7));
  CounterRng rng(8);
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<std::uint8_t> f = good;
    const int edits = 1 + static_cast<int>(rng.below(4));
    for (int e = 0; e < edits; ++e) {
      const std::size_t at = rng.below(std::min<std::size_t>(f.size(), 1200));
      switch (rng.below(3)) {
        case 0:
          f[at] = static_cast<std::uint8_t>(rng.below(256));
          break;
        case 1:
          f.erase(f.begin() + static_cast<std::ptrdiff_t>(at));
          break;
        default:
          f.insert(f.begin() + static_cast<std::ptrdiff_t>(at), static_cast<std::uint8_t>(rng.below(256)));
      }
    }
    try {
      const SplatCloud c = read_ply(f);
      EXPECT_NO_THROW(c.validate());
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParseError);
    }
  }
}

TEST(Ply, MissingFileIsIoError) {
  try {
    read_ply_file("/nonexistent/scene.ply");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
}

}  // namespace
}  // namespace sogs
