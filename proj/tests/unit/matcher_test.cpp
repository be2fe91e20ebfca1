#include <gtest/gtest.h>

#include <random>

#include "flexloc/matcher.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace flexloc;

namespace {

std::string random_word(std::mt19937& rng, std::size_t max_len, const std::string& alphabet) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s;
  for (std::size_t i = len(rng); i > 0; --i) s += alphabet[pick(rng)];
  return s;
}

std::string random_fqn(std::mt19937& rng) {
  static const std::vector<std::string> pkgs{"a", "a.b", "org.x", "org.x.y"};
  static const std::vector<std::string> classes{"Foo", "Bar", "FooBar", "Baz", "Zone"};
  static const std::vector<std::string> methods{"get", "set", "getA", "offset", "run", "runAll"};
  static const std::vector<std::string> types{"int", "long", "String", "Zone"};
  auto any = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  std::vector<std::string> args;
  for (int i = std::uniform_int_distribution<int>(0, 2)(rng); i > 0; --i) args.push_back(any(types));
  return make_fqn(any(pkgs), any(classes), any(methods), args);
}

}  // namespace

TEST(Levenshtein, KnownValues) {
  EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
  EXPECT_EQ(levenshtein("", ""), 0u);
  EXPECT_EQ(levenshtein("", "abc"), 3u);
  EXPECT_EQ(levenshtein("flaw", "lawn"), 2u);
  EXPECT_EQ(levenshtein("getOffset(long)", "getOffset(long)"), 0u);
}

TEST(Levenshtein, AgreesWithFullMatrixOracle) {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    auto a = random_word(rng, 12, "abcd");
    auto b = random_word(rng, 12, "abcd");
    ASSERT_EQ(levenshtein(a, b), oracle::levenshtein(a, b)) << a << " / " << b;
  }
}

TEST(Levenshtein, MetricProperties) {
  std::mt19937 rng(11);
  for (int i = 0; i < 300; ++i) {
    auto a = random_word(rng, 10, "xyz");
    auto b = random_word(rng, 10, "xyz");
    auto c = random_word(rng, 10, "xyz");
    EXPECT_EQ(levenshtein(a, b), levenshtein(b, a));
    EXPECT_EQ(levenshtein(a, b) == 0, a == b);
    EXPECT_LE(levenshtein(a, c), levenshtein(a, b) + levenshtein(b, c));
    EXPECT_LE(levenshtein(a, b), std::max(a.size(), b.size()));
  }
}

TEST(SplitComponents, SeparatorsAndArguments) {
  EXPECT_EQ(split_components("org.joda.time.DateTimeZone.getOffsetFromLocal(long)"),
            (std::vector<std::string>{"org", "joda", "time", "DateTimeZone", "getOffsetFromLocal", "long"}));
  EXPECT_EQ(split_components("a/b.c(int, long)"), (std::vector<std::string>{"a", "b", "c", "int", "long"}));
  EXPECT_TRUE(split_components("..()").empty());
}

TEST(Postprocess, ExactMatchShortCircuits) {
  std::vector<std::string> entities{"p.A.f(int)", "p.A.f(int,int)", "p.B.f(int)"};
  auto r = postprocess_detailed("p.A.f(int)", entities);
  EXPECT_EQ(r.phase, MatchPhase::Exact);
  EXPECT_EQ(r.names, std::vector<std::string>{"p.A.f(int)"});
}

TEST(Postprocess, ContainmentOfTheMethodNameFindsEveryOverride) {
  const auto& fqns = testsupport::time_index().all_method_fqns();
  auto r = postprocess_detailed("getOffsetFromLocal", fqns);
  EXPECT_EQ(r.phase, MatchPhase::Containment);
  EXPECT_EQ(r.names, (std::vector<std::string>{"org.joda.time.DateTimeZone.getOffsetFromLocal(long)",
                                               "org.joda.time.tz.FixedDateTimeZone.getOffsetFromLocal(long)"}));
}

TEST(Postprocess, ContainmentIsOrderInsensitive) {
  std::vector<std::string> entities{"p.Zone.get(long)", "p.Other.get(int)"};
  EXPECT_EQ(postprocess("get.Zone", entities), std::vector<std::string>{"p.Zone.get(long)"});
}

TEST(Postprocess, ContainmentCountsRepeatedComponents) {
  std::vector<std::string> entities{"p.A.f(int)", "p.A.f(int,int)"};
  auto r = postprocess_detailed("f(int,int)", entities);
  EXPECT_EQ(r.phase, MatchPhase::Containment);
  EXPECT_EQ(r.names, std::vector<std::string>{"p.A.f(int,int)"});
}

TEST(Postprocess, ContainmentIsCaseSensitive) {
  std::vector<std::string> entities{"p.A.getZone()", "p.A.getzone2()"};
  auto r = postprocess_detailed("getzone", entities);
  EXPECT_NE(r.phase, MatchPhase::Containment);
}

TEST(Postprocess, ThresholdPhaseIsStrictlyBelowFive) {
  std::vector<std::string> entities{"p.A.abcdef()", "p.A.abcdefghij()"};
  // 4 edits from the first, 8 from the second.
  auto r = postprocess_detailed("p.A.abzzzz()", entities);
  EXPECT_EQ(r.phase, MatchPhase::WithinThreshold);
  EXPECT_EQ(r.names, std::vector<std::string>{"p.A.abcdef()"});
  // Exactly 5 edits falls through to the closest phase.
  auto far = postprocess_detailed("p.A.azzzzz()", entities);
  EXPECT_EQ(far.phase, MatchPhase::Closest);
}

TEST(Postprocess, HallucinatedClassFallsBackToNearestNames) {
  const auto& fqns = testsupport::time_index().all_method_fqns();
  auto q = "org.joda.time.tz.DefaultNameProvider.getOffsetFromLocal(long)";
  auto r = postprocess_detailed(q, fqns);
  EXPECT_EQ(r.phase, MatchPhase::Closest);
  ASSERT_EQ(r.names.size(), 5u);
  EXPECT_EQ(r.names.front(), "org.joda.time.DateTimeZone.getOffsetFromLocal(long)");
  EXPECT_EQ(r.names, oracle::postprocess(q, fqns));
}

TEST(Postprocess, ClosestPhaseBreaksTiesByName) {
  std::vector<std::string> entities{"zz", "yy", "xx", "ww", "vv", "uu"};
  auto r = postprocess_detailed("abcdefgh", entities);
  EXPECT_EQ(r.names, (std::vector<std::string>{"uu", "vv", "ww", "xx", "yy"}));
  MatcherConfig cfg;
  cfg.fallback_count = 10;
  EXPECT_EQ(postprocess("abcdefgh", entities, cfg).size(), entities.size());
}

TEST(Postprocess, PhasesTakePrecedenceInOrder) {
  // "p.A.run()" is within threshold of the query, but containment wins.
  std::vector<std::string> entities{"p.A.run()", "q.Long.Name.runAll(int)"};
  auto r = postprocess_detailed("runAll", entities);
  EXPECT_EQ(r.phase, MatchPhase::Containment);
  EXPECT_EQ(r.names, std::vector<std::string>{"q.Long.Name.runAll(int)"});
}

TEST(Postprocess, AgreesWithOracleOnRandomEntitySets) {
  std::mt19937 rng(2024);
  for (int round = 0; round < 200; ++round) {
    std::vector<std::string> entities;
    std::set<std::string> seen;
    while (entities.size() < 50) {
      auto f = random_fqn(rng);
      if (seen.insert(f).second) entities.push_back(f);
    }
    std::string query;
    switch (round % 4) {
      case 0: query = random_fqn(rng); break;
      case 1: query = split_components(random_fqn(rng)).back(); break;
      case 2: query = random_word(rng, 14, "abcFooZ.(") + "x"; break;
      default: {
        auto f = entities[round % entities.size()];
        f[f.size() / 2] = '#';
        query = f;
      }
    }
    ASSERT_EQ(postprocess(query, entities), oracle::postprocess(query, entities)) << query;
  }
}

TEST(Postprocess, ResultsAlwaysComeFromTheEntityList) {
  std::mt19937 rng(5);
  std::vector<std::string> entities;
  for (int i = 0; i < 30; ++i) entities.push_back(random_fqn(rng));
  std::set<std::string> all(entities.begin(), entities.end());
  for (int i = 0; i < 100; ++i) {
    auto names = postprocess("g" + random_word(rng, 20, "abgetZone.(,)"), entities);
    EXPECT_FALSE(names.empty());
    for (const auto& n : names) EXPECT_TRUE(all.count(n)) << n;
  }
}

TEST(Postprocess, RejectsEmptyInputs) {
  EXPECT_THROW(postprocess("", {"a"}), ArgumentError);
  EXPECT_THROW(postprocess("a", {}), ArgumentError);
}

TEST(MatcherConfig, ValidatesValues) {
  MatcherConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.fallback_count = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
