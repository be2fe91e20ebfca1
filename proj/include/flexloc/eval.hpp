#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "flexloc/error.hpp"
#include "flexloc/ranked_list.hpp"
#include "flexloc/repo_index.hpp"
#include "flexloc/text.hpp"

namespace flexloc {

struct GroundTruth {
  std::string bug_id;
  std::set<std::string> buggy_fqns;
};

using TruthSet = std::map<std::string, GroundTruth>;
using ResultSet = std::map<std::string, RankedList>;

inline TruthSet truth_from_jsonl(std::string_view content, const std::string& what = "ground truth") {
  TruthSet out;
  auto lines = text::split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    std::string where = what + ":" + std::to_string(i + 1);
    auto doc = detail::parse_json(lines[i], where);
    if (!doc.is_object()) throw FormatError(where + ": expected JSON object");
    GroundTruth g;
    g.bug_id = detail::require_string(doc, "bug_id", where);
    const auto& methods = detail::require(doc, "buggy_methods", where);
    if (!methods.is_array()) throw FormatError(where + ".buggy_methods: expected array");
    for (const auto& m : methods) {
      if (!m.is_string()) throw FormatError(where + ".buggy_methods: expected strings");
      g.buggy_fqns.insert(m.get<std::string>());
    }
    if (g.buggy_fqns.empty()) throw FormatError(where + ".buggy_methods: must not be empty");
    if (out.count(g.bug_id)) throw FormatError(where + ": duplicate bug_id '" + g.bug_id + "'");
    out.emplace(g.bug_id, std::move(g));
  }
  return out;
}

inline TruthSet load_truth(const std::filesystem::path& file) {
  return truth_from_jsonl(text::read_file(file), file.string());
}

namespace detail {

inline const GroundTruth& truth_for(const TruthSet& truth, const std::string& bug_id) {
  auto it = truth.find(bug_id);
  if (it == truth.end()) throw PreconditionError("bug '" + bug_id + "' has no ground truth");
  return it->second;
}

// 1-based ranks of the buggy methods present in `list`, ascending.
inline std::vector<std::size_t> buggy_ranks(const RankedList& list, const GroundTruth& g) {
  std::vector<std::size_t> ranks;
  for (std::size_t i = 0; i < list.entries.size(); ++i)
    if (g.buggy_fqns.count(list.entries[i].fqn)) ranks.push_back(i + 1);
  return ranks;
}

}  // namespace detail

inline std::optional<std::size_t> first_hit_rank(const RankedList& list, const GroundTruth& g) {
  auto ranks = detail::buggy_ranks(list, g);
  if (ranks.empty()) return std::nullopt;
  return ranks.front();
}

// Mean of Prec@k over the buggy methods' ranks k; methods missing from the
// list add nothing but still count in the denominator.
inline double average_precision(const RankedList& list, const GroundTruth& g) {
  auto ranks = detail::buggy_ranks(list, g);
  double sum = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i)
    sum += static_cast<double>(i + 1) / static_cast<double>(ranks[i]);
  return sum / static_cast<double>(g.buggy_fqns.size());
}

inline std::size_t top_n(const ResultSet& results, const TruthSet& truth, std::size_t n) {
  if (n < 1) throw ArgumentError("top_n: N must be >= 1");
  std::size_t count = 0;
  for (const auto& [bug, list] : results) {
    auto hit = first_hit_rank(list, detail::truth_for(truth, bug));
    if (hit && *hit <= n) ++count;
  }
  return count;
}

inline double mean_average_precision(const ResultSet& results, const TruthSet& truth) {
  if (results.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [bug, list] : results) sum += average_precision(list, detail::truth_for(truth, bug));
  return sum / static_cast<double>(results.size());
}

inline double mean_reciprocal_rank(const ResultSet& results, const TruthSet& truth) {
  if (results.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [bug, list] : results) {
    auto hit = first_hit_rank(list, detail::truth_for(truth, bug));
    if (hit) sum += 1.0 / static_cast<double>(*hit);
  }
  return sum / static_cast<double>(results.size());
}

struct BugEval {
  std::optional<std::size_t> first_hit_rank;
  double avg_precision = 0.0;
  std::size_t list_size = 0;
};

struct EvalReport {
  std::size_t n = 0;
  std::map<std::size_t, std::size_t> top_n;  // N -> count
  double map = 0.0;
  double mrr = 0.0;
  std::map<std::string, BugEval> per_bug;
  std::vector<std::string> unevaluated;  // in the truth file but without results
};

// The evaluated set is the bugs in `results`; each must have ground truth.
inline EvalReport evaluate(const ResultSet& results, const TruthSet& truth,
                           const std::vector<std::size_t>& cutoffs = {1, 3, 5}) {
  EvalReport r;
  r.n = results.size();
  for (auto n : cutoffs) r.top_n[n] = top_n(results, truth, n);
  r.map = mean_average_precision(results, truth);
  r.mrr = mean_reciprocal_rank(results, truth);
  for (const auto& [bug, list] : results) {
    const auto& g = detail::truth_for(truth, bug);
    r.per_bug[bug] = {first_hit_rank(list, g), average_precision(list, g), list.size()};
  }
  for (const auto& [bug, g] : truth)
    if (!results.count(bug)) r.unevaluated.push_back(bug);
  return r;
}

inline nlohmann::ordered_json eval_report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  auto& top = j["top_n"] = nlohmann::ordered_json::object();
  for (const auto& [n, c] : r.top_n) top[std::to_string(n)] = c;
  j["map"] = r.map;
  j["mrr"] = r.mrr;
  auto& per = j["per_bug"] = nlohmann::ordered_json::object();
  for (const auto& [bug, b] : r.per_bug) {
    nlohmann::ordered_json bj;
    if (b.first_hit_rank) bj["first_hit_rank"] = *b.first_hit_rank;
    else bj["first_hit_rank"] = nullptr;
    bj["avg_precision"] = b.avg_precision;
    bj["list_size"] = b.list_size;
    per[bug] = std::move(bj);
  }
  j["unevaluated"] = r.unevaluated;
  return j;
}

namespace detail {

inline std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], row[c].size());
    }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) line += "  ";
      line += row[c];
      if (c + 1 < row.size()) line.append(width[c] - row[c].size(), ' ');
    }
    out += line + "\n";
  }
  return out;
}

}  // namespace detail

inline std::string render_eval_table(const EvalReport& r) {
  std::vector<std::vector<std::string>> summary{{"n"}, {std::to_string(r.n)}};
  for (const auto& [n, c] : r.top_n) {
    summary[0].push_back("Top-" + std::to_string(n));
    summary[1].push_back(std::to_string(c));
  }
  summary[0].insert(summary[0].end(), {"MAP", "MRR"});
  summary[1].insert(summary[1].end(), {detail::fixed(r.map), detail::fixed(r.mrr)});
  std::string out = detail::render_table(summary);

  if (!r.per_bug.empty()) {
    std::vector<std::vector<std::string>> rows{{"bug", "first_hit", "AvgP", "size"}};
    for (const auto& [bug, b] : r.per_bug)
      rows.push_back({bug, b.first_hit_rank ? std::to_string(*b.first_hit_rank) : "-",
                      detail::fixed(b.avg_precision), std::to_string(b.list_size)});
    out += "\n" + detail::render_table(rows);
  }
  if (!r.unevaluated.empty())
    out += "\nno results for: " + text::join(r.unevaluated, ", ") + "\n";
  return out;
}

}  // namespace flexloc
