#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "flexloc/error.hpp"
#include "flexloc/text.hpp"

namespace flexloc {

struct RankedEntry {
  std::string fqn;
  double score = 0.0;
  int rank = 0;           // 1-based
  std::string technique;  // provenance of this entry

  bool operator==(const RankedEntry&) const = default;
};

struct RankedList {
  std::string technique;
  std::vector<RankedEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  bool contains(std::string_view fqn) const {
    for (const auto& e : entries)
      if (e.fqn == fqn) return true;
    return false;
  }
  std::vector<std::string> fqns() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.fqn);
    return out;
  }

  // Appends with the next rank; the entry inherits the list's technique
  // unless one is given.
  void push(std::string fqn, double score, std::string technique_label = {}) {
    entries.push_back({std::move(fqn), score, static_cast<int>(entries.size()) + 1,
                       technique_label.empty() ? technique : std::move(technique_label)});
  }

  // Builds a list from an ordering alone; scores are 1/rank.
  static RankedList from_order(std::string technique, const std::vector<std::string>& fqns) {
    RankedList out{std::move(technique), {}};
    for (const auto& f : fqns) out.push(f, 1.0 / static_cast<double>(out.entries.size() + 1));
    return out;
  }

  bool operator==(const RankedList&) const = default;
};

// Ranks 1..n in order, no repeated FQN, scores non-increasing.
inline void validate_ranked_list(const RankedList& list) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    const auto& e = list.entries[i];
    if (e.rank != static_cast<int>(i) + 1)
      throw FormatError("ranked list '" + list.technique + "': rank " + std::to_string(e.rank) +
                        " at position " + std::to_string(i + 1));
    if (!seen.insert(e.fqn).second)
      throw FormatError("ranked list '" + list.technique + "': duplicate fqn " + e.fqn);
    if (i > 0 && e.score > list.entries[i - 1].score)
      throw FormatError("ranked list '" + list.technique + "': score increases at rank " +
                        std::to_string(e.rank));
  }
}

namespace detail {

inline nlohmann::ordered_json score_to_json(double s) {
  if (std::isinf(s)) return s > 0 ? "inf" : "-inf";
  if (std::isnan(s)) return "nan";
  return s;
}

inline double score_from_json(const nlohmann::json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw FormatError(where + ".score: expected number or \"inf\"");
}

}  // namespace detail

inline nlohmann::ordered_json entry_to_json(const RankedEntry& e) {
  nlohmann::ordered_json j;
  j["rank"] = e.rank;
  j["fqn"] = e.fqn;
  j["score"] = detail::score_to_json(e.score);
  j["technique"] = e.technique;
  return j;
}

inline nlohmann::ordered_json ranked_list_to_json(const RankedList& list) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : list.entries) arr.push_back(entry_to_json(e));
  return arr;
}

// One JSON object per line: {"rank":…, "fqn":…, "score":…, "technique":…}.
inline std::string ranked_list_to_jsonl(const RankedList& list) {
  std::string out;
  for (const auto& e : list.entries) {
    out += entry_to_json(e).dump();
    out += '\n';
  }
  return out;
}

inline RankedEntry entry_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + ": expected object");
  RankedEntry e;
  auto fqn = j.find("fqn");
  if (fqn == j.end() || !fqn->is_string()) throw FormatError(where + ".fqn: expected string");
  e.fqn = fqn->get<std::string>();
  auto rank = j.find("rank");
  if (rank == j.end() || !rank->is_number_integer())
    throw FormatError(where + ".rank: expected integer");
  e.rank = rank->get<int>();
  auto score = j.find("score");
  if (score != j.end()) e.score = detail::score_from_json(*score, where);
  auto tech = j.find("technique");
  if (tech != j.end()) {
    if (!tech->is_string()) throw FormatError(where + ".technique: expected string");
    e.technique = tech->get<std::string>();
  }
  return e;
}

// Entries are sorted by their rank field, then renumbered 1..n. Missing
// scores default to 1/rank; a missing technique label falls back to
// `default_technique`.
inline RankedList ranked_list_from_jsonl(std::string_view content, std::string default_technique,
                                         const std::string& what = "ranked list") {
  std::vector<RankedEntry> entries;
  std::vector<bool> has_score;
  std::size_t line_no = 0;
  for (const auto& raw : text::split_lines(content)) {
    ++line_no;
    auto line = text::trim(raw);
    if (line.empty()) continue;
    std::string where = what + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(where + ": invalid JSON: " + e.what());
    }
    auto e = entry_from_json(j, where);
    has_score.push_back(j.contains("score"));
    if (e.technique.empty()) e.technique = default_technique;
    entries.push_back(std::move(e));
  }
  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return entries[a].rank < entries[b].rank; });
  RankedList list{std::move(default_technique), {}};
  std::unordered_set<std::string> seen;
  for (std::size_t idx : order) {
    auto& e = entries[idx];
    if (!seen.insert(e.fqn).second) continue;
    e.rank = static_cast<int>(list.entries.size()) + 1;
    if (!has_score[idx]) e.score = 1.0 / e.rank;
    list.entries.push_back(std::move(e));
  }
  return list;
}

inline RankedList load_ranked_list(const std::filesystem::path& file, std::string technique) {
  return ranked_list_from_jsonl(text::read_file(file), std::move(technique), file.string());
}

inline void save_ranked_list(const RankedList& list, const std::filesystem::path& file) {
  text::write_file(file, ranked_list_to_jsonl(list));
}

}  // namespace flexloc
