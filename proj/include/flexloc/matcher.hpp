#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flexloc/error.hpp"

namespace flexloc {

struct MatcherConfig {
  std::size_t edit_distance_threshold = 5;
  std::size_t fallback_count = 5;
  std::string delimiters = "./(";

  void validate() const {
    if (edit_distance_threshold == 0) throw ConfigError("matcher: edit_distance_threshold must be > 0");
    if (fallback_count == 0) throw ConfigError("matcher: fallback_count must be > 0");
  }
};

// Unit-cost edit distance, two-row DP.
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return a.size();
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + cost});
      diag = up;
    }
  }
  return row[b.size()];
}

// Name components used for containment matching. Besides the configured
// delimiters, `)` and `,` separate argument types and whitespace is dropped.
inline std::vector<std::string> split_components(std::string_view name,
                                                 std::string_view delimiters = "./(") {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : name) {
    bool sep = delimiters.find(c) != std::string_view::npos || c == ')' || c == ',' ||
               c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (sep) {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

enum class MatchPhase { Exact, Containment, WithinThreshold, Closest };

struct MatchResult {
  std::vector<std::string> names;
  MatchPhase phase = MatchPhase::Closest;

  // Exact/containment/threshold hits are genuine matches; Closest results
  // are only suggestions.
  bool is_match() const { return phase != MatchPhase::Closest; }
};

// Repairs an inaccurate code-element name against the real FQNs:
//   1. entities whose components include every query component (as a
//      multiset, so `f(int,int)` does not match `f(int)`),
//   2. else entities within the edit-distance threshold,
//   3. else the `fallback_count` nearest entities.
// A query equal to an entity short-circuits to that entity alone.
inline MatchResult postprocess_detailed(std::string_view query,
                                        const std::vector<std::string>& entities,
                                        const MatcherConfig& cfg = {}) {
  if (query.empty()) throw ArgumentError("postprocess: empty query");
  if (entities.empty()) throw ArgumentError("postprocess: empty entity list");

  MatchResult result;
  for (const auto& e : entities) {
    if (e == query) {
      result.names = {e};
      result.phase = MatchPhase::Exact;
      return result;
    }
  }

  auto query_parts = split_components(query, cfg.delimiters);
  if (!query_parts.empty()) {
    std::unordered_map<std::string_view, std::size_t> need;
    for (const auto& q : query_parts) ++need[q];
    for (const auto& e : entities) {
      auto parts = split_components(e, cfg.delimiters);
      std::unordered_map<std::string_view, std::size_t> have;
      for (const auto& p : parts) ++have[p];
      bool all = std::all_of(need.begin(), need.end(), [&](const auto& q) {
        auto it = have.find(q.first);
        return it != have.end() && it->second >= q.second;
      });
      if (all) result.names.push_back(e);
    }
    if (!result.names.empty()) {
      result.phase = MatchPhase::Containment;
      return result;
    }
  }

  std::vector<std::pair<std::size_t, const std::string*>> distances;
  distances.reserve(entities.size());
  for (const auto& e : entities) {
    auto d = levenshtein(query, e);
    distances.emplace_back(d, &e);
    if (d < cfg.edit_distance_threshold) result.names.push_back(e);
  }
  if (!result.names.empty()) {
    result.phase = MatchPhase::WithinThreshold;
    return result;
  }

  std::size_t n = std::min(cfg.fallback_count, distances.size());
  std::partial_sort(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(n),
                    distances.end(), [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first < b.first : *a.second < *b.second;
                    });
  for (std::size_t i = 0; i < n; ++i) result.names.push_back(*distances[i].second);
  result.phase = MatchPhase::Closest;
  return result;
}

inline std::vector<std::string> postprocess(std::string_view query,
                                            const std::vector<std::string>& entities,
                                            const MatcherConfig& cfg = {}) {
  return postprocess_detailed(query, entities, cfg).names;
}

}  // namespace flexloc
