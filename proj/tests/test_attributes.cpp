#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "sogs/attributes.hpp"
#include "sogs/error.hpp"
#include "sogs/splat_cloud.hpp"

namespace sogs {
namespace {

TEST(Attributes, NamesRoundTrip) {
  for (Attribute a : kAllAttributes) {
    EXPECT_EQ(parse_attribute(attribute_name(a)), a);
  }
  EXPECT_FALSE(parse_attribute("colour").has_value());
  EXPECT_EQ(attribute_name(Attribute::kShDc), "sh_dc");
}

TEST(Attributes, ChannelCounts) {
  EXPECT_EQ(fixed_channels(Attribute::kPosition), 3u);
  EXPECT_EQ(fixed_channels(Attribute::kShRest), 45u);
  EXPECT_EQ(fixed_channels(Attribute::kOpacity), 1u);
  EXPECT_EQ(fixed_channels(Attribute::kRotation), 4u);
}

TEST(SplatCloud, ShapesFollowShMode) {
  SplatCloud with(3, true), without(3, false);
  EXPECT_EQ(with.channels(Attribute::kShRest), 45u);
  EXPECT_EQ(without.channels(Attribute::kShRest), 0u);
  EXPECT_EQ(with.sh_degree(), 3);
  EXPECT_EQ(without.sh_degree(), 0);
  EXPECT_EQ(with.values(Attribute::kShRest).size(), 135u);
  EXPECT_EQ(with.without_sh_rest().channels(Attribute::kShRest), 0u);
}

TEST(SplatCloud, ValidateRejectsEmptyAndNonFinite) {
  SplatCloud empty;
  EXPECT_THROW(empty.validate(), Error);
  SplatCloud c(2, false);
  EXPECT_NO_THROW(c.validate());
  c.values(Attribute::kScale)[4] = std::numeric_limits<float>::quiet_NaN();
  try {
    c.validate();
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidInput);
  }
}

TEST(SplatCloud, GatherReordersRows) {
  SplatCloud c(3, true);
  for (std::size_t i = 0; i < 3; ++i) {
    for (Attribute a : kAllAttributes) {
      for (float& v : c.row(a, i)) v = static_cast<float>(i);
    }
  }
  const std::vector<std::uint32_t> idx{2, 0};
  const SplatCloud g = c.gather(idx);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.row(Attribute::kShRest, 0)[44], 2.0f);
  EXPECT_EQ(g.row(Attribute::kRotation, 1)[3], 0.0f);
}

TEST(Error, MessageCarriesCodeName) {
  const Error e(ErrorCode::kDecodeError, "plane position.png");
  EXPECT_EQ(e.code(), ErrorCode::kDecodeError);
  EXPECT_NE(std::string(e.what()).find("decode-error"), std::string::npos);
}

}  // namespace
}  // namespace sogs
