#include <gtest/gtest.h>

#include "flexloc/text.hpp"
#include "support.hpp"

using namespace flexloc;

TEST(Text, TrimAndWhitespace) {
  EXPECT_EQ(text::trim("  a b \n"), "a b");
  EXPECT_EQ(text::trim("   "), "");
  EXPECT_EQ(text::remove_whitespace(" f ( int , long ) "), "f(int,long)");
}

TEST(Text, NormalizeTypeText) {
  EXPECT_EQ(text::normalize_type_text("Map < K , V >"), "Map<K,V>");
  EXPECT_EQ(text::normalize_type_text("final   int"), "final int");
  EXPECT_EQ(text::normalize_type_text("String ..."), "String...");
}

TEST(Text, SplitLinesDropsOnlyTrailingEmptyLine) {
  EXPECT_EQ(text::split_lines("a\nb\n"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(text::split_lines("a\n\nb"), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_TRUE(text::split_lines("").empty());
}

TEST(Text, CamelCase) {
  EXPECT_EQ(text::split_camel_case("getOffsetFromLocal"),
            (std::vector<std::string>{"get", "Offset", "From", "Local"}));
  EXPECT_EQ(text::split_camel_case("HTTPServer2"), (std::vector<std::string>{"HTTP", "Server2"}));
  EXPECT_EQ(text::split_camel_case("ZONE_MOSCOW"), (std::vector<std::string>{"ZONE", "MOSCOW"}));
}

TEST(Text, Identifiers) {
  EXPECT_EQ(text::identifiers("a.b(c, 12x) $d"), (std::vector<std::string>{"a", "b", "c", "x", "$d"}));
}

TEST(Text, FileRoundTripCreatesParents) {
  testsupport::TempDir dir;
  auto p = dir / "x/y/z.txt";
  text::write_file(p, "hello\n");
  EXPECT_EQ(text::read_file(p), "hello\n");
  EXPECT_THROW(text::read_file(dir / "missing.txt"), ConfigError);
}
