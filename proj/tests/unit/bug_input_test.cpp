#include <gtest/gtest.h>

#include <random>

#include "flexloc/bug_input.hpp"
#include "support.hpp"

using namespace flexloc;

namespace {

BugInfo time25() { return load_bug_info(testsupport::bugs_dir() / "Time-25.bug.json"); }

TriggerTest simple_test(std::optional<int> start, int frame_line) {
  TriggerTest t;
  t.source = "void testX() {\n  a();\n  b();\n  c();\n}";
  t.start_line = start;
  t.exception_message = "java.lang.AssertionError";
  t.stack_trace = {{"org.junit.Assert.fail", "Assert.java", 88},
                   {"p.Lib.helper", "Lib.java", 7},
                   {"p.SomeTest.testX", "SomeTest.java", frame_line}};
  return t;
}

}  // namespace

TEST(BugInfo, LoadsTheFixture) {
  auto bug = time25();
  EXPECT_EQ(bug.bug_id, "Time-25");
  ASSERT_TRUE(bug.has_report());
  EXPECT_EQ(bug.report->title, "#90 DateTimeZone.getOffsetFromLocal error during DST transition");
  ASSERT_EQ(bug.trigger_tests.size(), 1u);
  EXPECT_EQ(bug.trigger_tests[0].start_line, 920);
  EXPECT_EQ(bug.trigger_tests[0].stack_trace.size(), 2u);
  EXPECT_EQ(bug.project_prefixes, std::vector<std::string>{"org.joda.time"});
}

TEST(Preprocess, Time25CutsAtTheFailingAssertion) {
  auto bug = time25();
  auto p = preprocess_trigger_test(bug.trigger_tests[0], bug.project_prefixes);
  EXPECT_EQ(p.truncated_after, 3);
  EXPECT_TRUE(p.warnings.empty());
  EXPECT_EQ(p.text,
            "public void test_DateTime_constructor_Moscow_Autumn() {\n"
            "    DateTime dt = new DateTime(2007, 10, 28, 2, 30, ZONE_MOSCOW);\n"
            "    assertEquals(\"2007-10-28T02:30:00.000+04:00\", dt.toString());\n"
            "The last line shown above failed with the following stack trace.\n"
            "junit.framework.ComparisonFailure: expected:<...10-28T02:30:00.000+0[4]:00> but was:"
            "<...10-28T02:30:00.000+0[3]:00>\n"
            "at org.joda.time.TestDateTimeZoneCutover.test_DateTime_constructor_Moscow_Autumn"
            "(TestDateTimeZoneCutover.java:922)");
  EXPECT_EQ(p.text.find("junit.framework.Assert"), std::string::npos);
  EXPECT_EQ(p.text.find("getZone()"), std::string::npos);
}

TEST(Preprocess, KeepsOnlyProgramFramesInOrder) {
  auto p = preprocess_trigger_test(simple_test(10, 12), {"p"});
  EXPECT_EQ(p.truncated_after, 3);
  EXPECT_EQ(p.text,
            "void testX() {\n  a();\n  b();\n"
            "The last line shown above failed with the following stack trace.\n"
            "java.lang.AssertionError\n"
            "at p.Lib.helper(Lib.java:7)\n"
            "at p.SomeTest.testX(SomeTest.java:12)");
}

TEST(Preprocess, PrefixMatchesOnlyAtPackageBoundaries) {
  EXPECT_TRUE(belongs_to_program("org.joda.time.DateTime.x", {"org.joda.time"}));
  EXPECT_TRUE(belongs_to_program("org.joda.time", {"org.joda.time"}));
  EXPECT_FALSE(belongs_to_program("org.joda.timex.A.b", {"org.joda.time"}));
  EXPECT_FALSE(belongs_to_program("junit.framework.Assert.fail", {"org.joda.time", ""}));
}

TEST(Preprocess, WithoutStartLineKeepsFullSourceAndWarns) {
  auto p = preprocess_trigger_test(simple_test(std::nullopt, 12), {"p"});
  EXPECT_FALSE(p.truncated_after);
  ASSERT_EQ(p.warnings.size(), 1u);
  EXPECT_NE(p.warnings[0].find("testX"), std::string::npos);
  EXPECT_NE(p.text.find("  c();\n}\nThe test above failed with the following stack trace."), std::string::npos);
}

TEST(Preprocess, FrameOutsideTheTestBodyKeepsFullSource) {
  auto p = preprocess_trigger_test(simple_test(10, 40), {"p"});
  EXPECT_FALSE(p.truncated_after);
  ASSERT_EQ(p.warnings.size(), 1u);
  EXPECT_NE(p.text.find("c();"), std::string::npos);
}

TEST(Preprocess, EmptyStackTraceIsAPreconditionError) {
  auto t = simple_test(10, 12);
  t.stack_trace.clear();
  EXPECT_THROW(preprocess_trigger_test(t, {"p"}), PreconditionError);
}

TEST(Preprocess, NeverLongerThanTheRawRendering) {
  std::mt19937 rng(3);
  for (int i = 0; i < 300; ++i) {
    int body = std::uniform_int_distribution<int>(1, 12)(rng);
    TriggerTest t;
    t.source = "void testR() {\n";
    for (int l = 0; l < body; ++l) t.source += "  step" + std::to_string(l) + "();\n";
    t.source += "}";
    int start = std::uniform_int_distribution<int>(1, 50)(rng);
    if (i % 5 != 0) t.start_line = start;
    t.exception_message = i % 3 ? "boom" : "";
    int frames = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int f = 0; f < frames; ++f) {
      bool in_test = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
      bool ours = std::uniform_int_distribution<int>(0, 2)(rng) > 0;
      t.stack_trace.push_back({(ours ? "p.T." : "x.Y.") + std::string(in_test ? "testR" : "other"), "T.java",
                               start + std::uniform_int_distribution<int>(-3, body + 4)(rng)});
    }
    auto p = preprocess_trigger_test(t, {"p"});
    EXPECT_LE(p.text.size(), render_trigger_test_raw(t).size()) << t.source;
    EXPECT_EQ(p.truncated_after.has_value(), p.warnings.empty());
    if (p.truncated_after) {
      EXPECT_GE(*p.truncated_after, 1);
      EXPECT_LE(*p.truncated_after, body + 2);
    }
  }
}

TEST(Preprocess, SeveralTestsAreJoinedByABlankLine) {
  auto p = render_trigger_tests({simple_test(10, 12), simple_test(std::nullopt, 12)}, {"p"});
  EXPECT_NE(p.text.find("SomeTest.java:12)\n\nvoid testX()"), std::string::npos);
  EXPECT_EQ(p.warnings.size(), 1u);
}

TEST(Preprocess, TestMethodName) {
  EXPECT_EQ(test_method_name("public void testFoo () {"), "testFoo");
  EXPECT_EQ(test_method_name("@Test\nvoid bar(){}"), "bar");
  EXPECT_EQ(test_method_name("no parens"), "");
}

TEST(Report, RendersTitleAndDescription) {
  EXPECT_EQ(render_report({"T", "D"}), "Title: T\nDescription: D");
}

TEST(EffectivePrefixes, FallsBackToIndexPaths) {
  BugInfo bug;
  bug.report = BugReport{"t", ""};
  auto p = effective_prefixes(bug, testsupport::time_index());
  EXPECT_EQ(p.size(), 5u);
  bug.project_prefixes = {"x"};
  EXPECT_EQ(effective_prefixes(bug, testsupport::time_index()), std::vector<std::string>{"x"});
}

TEST(BugInfo, EitherModalityAlone) {
  auto r = bug_info_from_json(R"({"report":{"title":"t"}})");
  EXPECT_TRUE(r.has_report());
  EXPECT_FALSE(r.has_trigger_tests());
  EXPECT_EQ(r.report->description, "");
  auto t = bug_info_from_json(
      R"({"trigger_tests":[{"source":"void t(){}","stack_trace":[{"fqn":"a.B.t","file":"B.java","line":1}]}]})");
  EXPECT_FALSE(t.has_report());
  EXPECT_TRUE(t.has_trigger_tests());
}

TEST(BugInfo, ErrorsNameTheField) {
  auto expect_msg = [](const std::string& doc, const std::string& needle) {
    try {
      bug_info_from_json(doc, "bug.json");
      ADD_FAILURE() << doc;
    } catch (const FormatError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_msg("{}", "at least one");
  expect_msg(R"({"report":{"description":"d"}})", "bug.json.report.title");
  expect_msg(R"({"trigger_tests":[{"source":"s","stack_trace":[]}]})", "stack_trace: must not be empty");
  expect_msg(R"({"trigger_tests":[{"source":"s","stack_trace":[{"fqn":"a","file":"f"}]}]})",
             "stack_trace[0].line");
  expect_msg(R"({"report":{"title":"t"},"project_prefixes":"org"})", "project_prefixes");
  expect_msg("[1]", "expected JSON object");
}

TEST(BugInfo, MissingFileIsAnError) {
  EXPECT_THROW(load_bug_info("/nonexistent/bug.json"), Error);
}
