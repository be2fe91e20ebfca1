#include <gtest/gtest.h>

#include <random>

#include "flexloc/eval.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace flexloc;

namespace {

GroundTruth truth(std::string id, std::set<std::string> buggy) { return {std::move(id), std::move(buggy)}; }

}  // namespace

TEST(Metrics, HandCases) {
  auto list = RankedList::from_order("t", {"a", "b", "c", "d"});
  EXPECT_EQ(first_hit_rank(list, truth("x", {"c"})), 3u);
  EXPECT_FALSE(first_hit_rank(list, truth("x", {"z"})));
  EXPECT_DOUBLE_EQ(average_precision(list, truth("x", {"b", "d"})), (1.0 / 2 + 2.0 / 4) / 2);
  // A buggy method missing from the list still counts in the denominator.
  EXPECT_DOUBLE_EQ(average_precision(list, truth("x", {"a", "z"})), 1.0 / 2);
  EXPECT_DOUBLE_EQ(average_precision(list, truth("x", {"z"})), 0.0);
}

TEST(Metrics, AggregatesOverBugs) {
  ResultSet results{{"b1", RankedList::from_order("t", {"x", "y"})},
                    {"b2", RankedList::from_order("t", {"p", "q", "r"})},
                    {"b3", RankedList::from_order("t", {"m"})}};
  TruthSet t{{"b1", truth("b1", {"x"})}, {"b2", truth("b2", {"r"})}, {"b3", truth("b3", {"n"})},
             {"b4", truth("b4", {"w"})}};
  EXPECT_EQ(top_n(results, t, 1), 1u);
  EXPECT_EQ(top_n(results, t, 3), 2u);
  EXPECT_DOUBLE_EQ(mean_reciprocal_rank(results, t), (1.0 + 1.0 / 3) / 3);
  EXPECT_DOUBLE_EQ(mean_average_precision(results, t), (1.0 + 1.0 / 3) / 3);
  auto rep = evaluate(results, t);
  EXPECT_EQ(rep.n, 3u);
  EXPECT_EQ(rep.top_n.at(1), 1u);
  EXPECT_EQ(rep.top_n.at(5), 2u);
  EXPECT_EQ(rep.unevaluated, std::vector<std::string>{"b4"});
  EXPECT_FALSE(rep.per_bug.at("b3").first_hit_rank);
}

TEST(Metrics, AgreeWithBruteForceOracle) {
  std::mt19937 rng(4242);
  ResultSet results;
  TruthSet t;
  std::vector<oracle::Bug> bugs;
  for (int i = 0; i < 1000; ++i) {
    std::string id = "bug" + std::to_string(i);
    std::size_t universe = std::uniform_int_distribution<std::size_t>(1, 30)(rng);
    std::vector<std::string> order;
    std::set<std::string> used;
    std::size_t len = std::uniform_int_distribution<std::size_t>(0, universe)(rng);
    while (order.size() < len) {
      auto f = "f" + std::to_string(std::uniform_int_distribution<std::size_t>(0, universe - 1)(rng));
      if (used.insert(f).second) order.push_back(f);
    }
    std::set<std::string> buggy;
    std::size_t nb = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    while (buggy.size() < std::min(nb, universe))
      buggy.insert("f" + std::to_string(std::uniform_int_distribution<std::size_t>(0, universe - 1)(rng)));
    results[id] = RankedList::from_order("t", order);
    t[id] = truth(id, buggy);
    bugs.push_back({order, buggy});
  }
  for (std::size_t n : {1u, 3u, 5u, 10u}) {
    std::size_t expect = 0;
    for (const auto& b : bugs) expect += oracle::hit_within(b, n) ? 1 : 0;
    EXPECT_EQ(top_n(results, t, n), expect) << n;
  }
  double map = 0, mrr = 0;
  for (const auto& b : bugs) {
    map += oracle::avg_precision(b);
    mrr += oracle::reciprocal_rank(b);
  }
  EXPECT_NEAR(mean_average_precision(results, t), map / 1000.0, 1e-12);
  EXPECT_NEAR(mean_reciprocal_rank(results, t), mrr / 1000.0, 1e-12);
}

TEST(Metrics, Properties) {
  std::mt19937 rng(8);
  for (int round = 0; round < 200; ++round) {
    ResultSet results;
    TruthSet t;
    for (int i = 0; i < 10; ++i) {
      std::string id = "b" + std::to_string(i);
      std::vector<std::string> order;
      for (int j = 0; j < 8; ++j) order.push_back("m" + std::to_string((j * 7 + i + round) % 11));
      std::set<std::string> uniq;
      std::vector<std::string> dedup;
      for (auto& o : order)
        if (uniq.insert(o).second) dedup.push_back(o);
      results[id] = RankedList::from_order("t", dedup);
      t[id] = truth(id, {"m" + std::to_string(std::uniform_int_distribution<int>(0, 12)(rng))});
    }
    std::size_t prev = 0;
    for (std::size_t n = 1; n <= 10; ++n) {
      auto c = top_n(results, t, n);
      EXPECT_GE(c, prev);
      EXPECT_LE(c, results.size());
      prev = c;
    }
    double mrr = mean_reciprocal_rank(results, t);
    double map = mean_average_precision(results, t);
    EXPECT_GE(mrr, 0.0);
    EXPECT_LE(mrr, 1.0);
    // With a single buggy method per bug, AP equals the reciprocal rank.
    EXPECT_NEAR(map, mrr, 1e-12);
    EXPECT_GE(mrr, static_cast<double>(top_n(results, t, 1)) / results.size());
  }
}

TEST(Metrics, Preconditions) {
  ResultSet results{{"b1", RankedList::from_order("t", {"x"})}};
  TruthSet t{{"b1", truth("b1", {"x"})}};
  EXPECT_THROW(top_n(results, t, 0), ArgumentError);
  EXPECT_THROW(top_n(results, TruthSet{}, 1), PreconditionError);
  EXPECT_THROW(evaluate(results, TruthSet{}), PreconditionError);
  EXPECT_EQ(mean_reciprocal_rank({}, t), 0.0);
  EXPECT_EQ(evaluate({}, t).n, 0u);
}

TEST(Truth, LoadsJsonl) {
  auto t = load_truth(testsupport::fixtures() / "truth.jsonl");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.at("Time-25").buggy_fqns, std::set<std::string>{"org.joda.time.DateTimeZone.getOffsetFromLocal(long)"});
}

TEST(Truth, ErrorsNameTheLineAndField) {
  auto expect_msg = [](const std::string& doc, const std::string& needle) {
    try {
      truth_from_jsonl(doc, "truth.jsonl");
      ADD_FAILURE() << doc;
    } catch (const FormatError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_msg("{\"buggy_methods\":[\"a\"]}", "truth.jsonl:1.bug_id");
  expect_msg("{\"bug_id\":\"x\",\"buggy_methods\":[]}", "must not be empty");
  expect_msg("{\"bug_id\":\"x\",\"buggy_methods\":[\"a\"]}\n{\"bug_id\":\"x\",\"buggy_methods\":[\"b\"]}",
             "truth.jsonl:2: duplicate");
  expect_msg("\n{oops", "truth.jsonl:2");
  EXPECT_THROW(load_truth("/nonexistent/truth.jsonl"), Error);
}

TEST(Report, JsonAndTable) {
  ResultSet results{{"Time-25", RankedList::from_order("t", {"a", "org.joda.time.DateTimeZone.getOffsetFromLocal(long)"})}};
  auto t = load_truth(testsupport::fixtures() / "truth.jsonl");
  auto r = evaluate(results, t);
  auto j = eval_report_to_json(r);
  EXPECT_EQ(j["n"], 1);
  EXPECT_EQ(j["top_n"]["1"], 0);
  EXPECT_EQ(j["top_n"]["3"], 1);
  EXPECT_DOUBLE_EQ(j["mrr"].get<double>(), 0.5);
  EXPECT_EQ(j["per_bug"]["Time-25"]["first_hit_rank"], 2);
  auto table = render_eval_table(r);
  EXPECT_EQ(table.substr(0, table.find('\n')), "n  Top-1  Top-3  Top-5  MAP     MRR");
  EXPECT_NE(table.find("1  0      1      1      0.5000  0.5000"), std::string::npos) << table;
  EXPECT_NE(table.find("Time-25  2"), std::string::npos) << table;
}
