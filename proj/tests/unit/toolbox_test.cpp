#include <gtest/gtest.h>

#include "flexloc/toolbox.hpp"
#include "support.hpp"

using namespace flexloc;

namespace {

const std::string kBuggy = "org.joda.time.DateTimeZone.getOffsetFromLocal(long)";

const Toolbox& tools() {
  static const Toolbox t(testsupport::time_index());
  return t;
}

RankedList twenty_candidates() {
  const auto& all = testsupport::time_index().all_method_fqns();
  std::vector<std::string> picked;
  for (const auto& f : all)
    if (f != kBuggy && picked.size() < 17) picked.push_back(f);
  picked.push_back(kBuggy);
  picked.push_back("org.joda.time.Missing.gone()");
  picked.push_back(all.back());
  return RankedList::from_order("fused", picked);
}

}  // namespace

TEST(Arguments, CleanStripsQuotesAndKeywords) {
  EXPECT_EQ(clean_argument("  \"DateTimeZone\" "), "DateTimeZone");
  EXPECT_EQ(clean_argument("`x.y`"), "x.y");
  EXPECT_EQ(clean_argument("class_name = 'Foo'"), "Foo");
  EXPECT_EQ(clean_argument("a==b"), "=b");
  EXPECT_EQ(clean_argument("\"unbalanced"), "\"unbalanced");
}

TEST(Arguments, SplitRespectsNesting) {
  EXPECT_EQ(split_arguments("a, f(b, c), \"d,e\""), (std::vector<std::string>{"a", "f(b, c)", "d,e"}));
  EXPECT_EQ(split_arguments("Map<K, V>"), std::vector<std::string>{"Map<K, V>"});
  EXPECT_TRUE(split_arguments("   ").empty());
}

TEST(CapOutput, ShortTextIsUntouched) {
  ToolResult r{"short", false, false};
  EXPECT_EQ(cap_output(r, 80), r);
}

TEST(CapOutput, LongTextIsCutWithMarkerInsideTheCap) {
  for (std::size_t len : {6001u, 6500u, 20000u, 123456u}) {
    ToolResult r{std::string(len, 'x'), false, false};
    auto capped = cap_output(r, kDefaultToolOutputCap);
    EXPECT_EQ(capped.text.size(), kDefaultToolOutputCap) << len;
    auto marker = capped.text.find("[output truncated: ");
    ASSERT_NE(marker, std::string::npos);
    auto kept = capped.text.find('\n');
    std::size_t dropped = len - kept;
    EXPECT_NE(capped.text.find(std::to_string(dropped) + " more characters]"), std::string::npos) << capped.text.substr(kept);
  }
}

TEST(Toolbox, GetPathsListsEveryPackage) {
  auto r = tools().get_paths();
  EXPECT_FALSE(r.is_error);
  EXPECT_EQ(r.text, "org.joda.time\norg.joda.time.base\norg.joda.time.chrono\norg.joda.time.format\norg.joda.time.tz");
}

TEST(Toolbox, ClassesOfPath) {
  auto r = tools().get_classes_of_path("org.joda.time.tz");
  EXPECT_FALSE(r.is_error);
  EXPECT_EQ(r.text,
            "CachedDateTimeZone\nCachedDateTimeZone.Info\nDateTimeZoneBuilder\nDateTimeZoneBuilder.DSTZone\n"
            "DateTimeZoneBuilder.PrecalculatedZone\nDateTimeZoneBuilder.RuleSet\nDefaultNameProvider\n"
            "FixedDateTimeZone");
}

TEST(Toolbox, ClassesOfMisspelledPathIsRepaired) {
  auto r = tools().get_classes_of_path("org.joda.time.chronoo");
  EXPECT_FALSE(r.is_error);
  EXPECT_NE(r.text.find("classes of org.joda.time.chrono"), std::string::npos) << r.text;
}

TEST(Toolbox, MethodsOfClass) {
  auto r = tools().get_methods_of_class("org.joda.time.tz.FixedDateTimeZone");
  EXPECT_FALSE(r.is_error);
  EXPECT_EQ(r.text,
            "FixedDateTimeZone(String,String,int,int)\ngetNameKey(long)\ngetOffset(long)\ngetStandardOffset(long)\n"
            "getOffsetFromLocal(long)\nisFixed()\nnextTransition(long)\npreviousTransition(long)\nequals(Object)");
}

TEST(Toolbox, MethodsOfSimpleClassNameResolvesUniquely) {
  auto r = tools().get_methods_of_class("FixedDateTimeZone");
  EXPECT_FALSE(r.is_error);
  EXPECT_EQ(r.text.rfind("Methods of class org.joda.time.tz.FixedDateTimeZone:\n", 0), 0u) << r.text;
}

TEST(Toolbox, MethodsOfAmbiguousClassSuggests) {
  auto r = tools().get_methods_of_class("Zone");
  EXPECT_TRUE(r.is_error);
  EXPECT_EQ(r.text.rfind("No class named 'Zone'. Did you mean:\n", 0), 0u) << r.text;
}

TEST(Toolbox, SnippetOfExactFqnIsVerbatim) {
  auto r = tools().get_code_snippet_of_method(kBuggy);
  EXPECT_FALSE(r.is_error);
  EXPECT_EQ(r.text, testsupport::time_index().find_method(kBuggy)->snippet);
}

TEST(Toolbox, SnippetOfAmbiguousNameListsChoices) {
  auto r = tools().get_code_snippet_of_method("getOffsetFromLocal");
  EXPECT_TRUE(r.is_error);
  EXPECT_NE(r.text.find(kBuggy), std::string::npos);
  EXPECT_NE(r.text.find("org.joda.time.tz.FixedDateTimeZone.getOffsetFromLocal(long)"), std::string::npos);
}

TEST(Toolbox, SnippetOfUniquePartialNameAppendsFooter) {
  auto r = tools().get_code_snippet_of_method("DateTimeZone.convertLocalToUTC");
  EXPECT_FALSE(r.is_error);
  const std::string fqn = "org.joda.time.DateTimeZone.convertLocalToUTC(long,boolean)";
  EXPECT_EQ(r.text, testsupport::time_index().find_method(fqn)->snippet + "// method: " + fqn + "\n");
}

TEST(Toolbox, FooterFqnFeedsBackToTheSameSnippet) {
  auto r = tools().get_code_snippet_of_method("ZonedChronology.localToUTC");
  auto pos = r.text.rfind("// method: ");
  ASSERT_NE(pos, std::string::npos);
  auto fqn = r.text.substr(pos + 11);
  fqn.pop_back();
  auto again = tools().get_code_snippet_of_method(fqn);
  EXPECT_EQ(again.text, r.text.substr(0, pos));
}

TEST(Toolbox, SnippetOfHallucinatedMethodOnlySuggests) {
  auto r = tools().get_code_snippet_of_method("org.joda.time.tz.DefaultNameProvider.getOffsetFromLocal(long)");
  EXPECT_TRUE(r.is_error);
  EXPECT_EQ(r.text.rfind("No method named", 0), 0u);
  EXPECT_NE(r.text.find(kBuggy), std::string::npos);
}

TEST(Toolbox, SnippetIgnoresWhitespaceInsideTheName) {
  auto r = tools().get_code_snippet_of_method("org.joda.time.DateTimeZone.getOffsetFromLocal( long )");
  EXPECT_FALSE(r.is_error);
  EXPECT_EQ(r.text, testsupport::time_index().find_method(kBuggy)->snippet);
}

TEST(Toolbox, SnippetByCandidateIndex) {
  auto c = twenty_candidates();
  auto r = tools().get_code_snippet_by_candidate_index(c, "18");
  EXPECT_FALSE(r.is_error);
  EXPECT_EQ(r.text, testsupport::time_index().find_method(kBuggy)->snippet + "// method: " + kBuggy + "\n");
  auto missing = tools().get_code_snippet_by_candidate_index(c, 19);
  EXPECT_FALSE(missing.is_error);
  EXPECT_NE(missing.text.find("not available"), std::string::npos);
  for (const char* bad : {"0", "21", "-1", "abc", "", "1.5"}) {
    auto e = tools().get_code_snippet_by_candidate_index(c, bad);
    EXPECT_TRUE(e.is_error) << bad;
    EXPECT_NE(e.text.find("between 1 and 20"), std::string::npos) << bad;
  }
}

TEST(Toolbox, FindClassAndMethodAreFuzzy) {
  auto c = tools().find_class("DateTimeZone");
  EXPECT_FALSE(c.is_error);
  EXPECT_EQ(c.text.substr(0, c.text.find('\n')), "org.joda.time.DateTimeZone");
  auto m = tools().find_method("nextTransitoin");
  EXPECT_FALSE(m.is_error);
  EXPECT_EQ(std::count(m.text.begin(), m.text.end(), '\n'), 4);
  EXPECT_TRUE(tools().find_method("").is_error);
}

TEST(Toolbox, EveryResultRespectsTheCap) {
  Toolbox small(testsupport::time_index(), {}, 120);
  for (const auto& r : {small.get_paths(), small.get_classes_of_path("org.joda.time.tz"),
                        small.get_methods_of_class("org.joda.time.DateTimeZone"),
                        small.get_code_snippet_of_method(kBuggy), small.find_method("get")}) {
    EXPECT_LE(r.text.size(), 120u);
  }
  EXPECT_THROW(Toolbox(testsupport::time_index(), {}, 79), ConfigError);
}

TEST(Toolbox, EmptyIndexGivesErrorsNotCrashes) {
  RepoIndex empty;
  Toolbox t(empty);
  EXPECT_EQ(t.get_paths().text, "no paths");
  EXPECT_TRUE(t.get_classes_of_path("a").is_error);
  EXPECT_TRUE(t.get_methods_of_class("A").is_error);
  EXPECT_TRUE(t.get_code_snippet_of_method("f").is_error);
  EXPECT_TRUE(t.find_class("A").is_error);
}

TEST(AgentTools, SpaceReductionRegistersSevenCalls) {
  AgentTools sr(AgentKind::SpaceReduction, tools());
  std::vector<std::string> names;
  for (const auto& s : sr.specs()) names.push_back(s.name);
  EXPECT_EQ(names, (std::vector<std::string>{"get_paths", "get_classes_of_path", "get_methods_of_class",
                                             "get_code_snippet_of_method", "find_class", "find_method", "exit"}));
}

TEST(AgentTools, RefinementRegistersOnlySnippetAndExit) {
  auto c = twenty_candidates();
  AgentTools lr(AgentKind::LocalizationRefinement, tools(), &c);
  ASSERT_EQ(lr.specs().size(), 2u);
  EXPECT_FALSE(lr.is_registered("find_class"));
  auto r = lr.dispatch({"get_code_snippet_of_method", "18"});
  EXPECT_NE(r.text.find("// method: " + kBuggy), std::string::npos);
  EXPECT_EQ(lr.dispatch({"find_class", "DateTimeZone"}).text, kCorrectivePrompt);
  EXPECT_THROW(AgentTools(AgentKind::LocalizationRefinement, tools()), PreconditionError);
}

TEST(AgentTools, DispatchIsTotal) {
  AgentTools sr(AgentKind::SpaceReduction, tools());
  auto bogus = sr.dispatch({"bogus_fn", "x"});
  EXPECT_TRUE(bogus.is_error);
  EXPECT_EQ(bogus.text, "Please call functions in the right format `FunctionName(Argument).`");
  EXPECT_TRUE(sr.dispatch({"exit", ""}).is_exit);
  EXPECT_EQ(sr.dispatch({"get_methods_of_class", "\"org.joda.time.tz.FixedDateTimeZone\", extra"}).text,
            tools().get_methods_of_class("org.joda.time.tz.FixedDateTimeZone").text);
  EXPECT_TRUE(sr.dispatch({"get_classes_of_path", ""}).is_error);
}
