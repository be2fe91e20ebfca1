#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "flexloc/bug_input.hpp"
#include "flexloc/error.hpp"
#include "flexloc/ranked_list.hpp"
#include "flexloc/repo_index.hpp"
#include "flexloc/text.hpp"

namespace flexloc {

// ---------------------------------------------------------------------------
// Coverage spectra and SBFL
// ---------------------------------------------------------------------------

enum class TestOutcome { Pass, Fail };

struct TestCoverage {
  std::string id;
  TestOutcome outcome = TestOutcome::Pass;
  std::set<std::string> covered;
};

struct CoverageSpectrum {
  std::vector<TestCoverage> tests;

  std::size_t failing() const {
    return static_cast<std::size_t>(std::count_if(tests.begin(), tests.end(), [](const auto& t) {
      return t.outcome == TestOutcome::Fail;
    }));
  }
};

inline CoverageSpectrum spectrum_from_json(std::string_view content,
                                           const std::string& what = "spectrum") {
  auto doc = detail::parse_json(content, what);
  if (!doc.is_object()) throw FormatError(what + ": expected JSON object");
  const auto& tests = detail::require(doc, "tests", what);
  if (!tests.is_array()) throw FormatError(what + ".tests: expected array");
  CoverageSpectrum s;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    std::string where = what + ".tests[" + std::to_string(i) + "]";
    const auto& t = tests[i];
    if (!t.is_object()) throw FormatError(where + ": expected object");
    TestCoverage tc;
    tc.id = detail::require_string(t, "id", where);
    auto outcome = detail::require_string(t, "outcome", where);
    if (outcome == "pass") tc.outcome = TestOutcome::Pass;
    else if (outcome == "fail") tc.outcome = TestOutcome::Fail;
    else throw FormatError(where + ".outcome: expected \"pass\" or \"fail\"");
    const auto& cov = detail::require(t, "covered", where);
    if (!cov.is_array()) throw FormatError(where + ".covered: expected array");
    for (const auto& c : cov) {
      if (!c.is_string()) throw FormatError(where + ".covered: expected strings");
      tc.covered.insert(c.get<std::string>());
    }
    s.tests.push_back(std::move(tc));
  }
  return s;
}

inline CoverageSpectrum load_spectrum(const std::filesystem::path& file) {
  return spectrum_from_json(text::read_file(file), file.string());
}

// Drops covered FQNs the index does not know; returns one warning per FQN.
inline std::vector<std::string> resolve_spectrum(CoverageSpectrum& spectrum, const RepoIndex& index) {
  std::set<std::string> unknown;
  for (auto& t : spectrum.tests) {
    for (auto it = t.covered.begin(); it != t.covered.end();) {
      if (index.find_method(*it) == nullptr) {
        unknown.insert(*it);
        it = t.covered.erase(it);
      } else {
        ++it;
      }
    }
  }
  std::vector<std::string> warnings;
  for (const auto& u : unknown) warnings.push_back("spectrum: unresolved method dropped: " + u);
  return warnings;
}

struct SpectrumCounts {
  int ef = 0;  // failing tests covering the method
  int ep = 0;  // passing tests covering it
  int nf = 0;  // failing tests not covering it
  int np = 0;  // passing tests not covering it

  bool operator==(const SpectrumCounts&) const = default;
};

// Counts for every method covered by at least one test.
inline std::map<std::string, SpectrumCounts> count_spectrum(const CoverageSpectrum& spectrum) {
  int total_fail = 0, total_pass = 0;
  std::map<std::string, SpectrumCounts> counts;
  for (const auto& t : spectrum.tests) {
    bool fail = t.outcome == TestOutcome::Fail;
    (fail ? total_fail : total_pass)++;
    for (const auto& m : t.covered) {
      auto& c = counts[m];
      (fail ? c.ef : c.ep)++;
    }
  }
  for (auto& [m, c] : counts) {
    c.nf = total_fail - c.ef;
    c.np = total_pass - c.ep;
  }
  return counts;
}

enum class SbflFormula { Ochiai, DStar2, Tarantula };

inline std::string_view formula_label(SbflFormula f) {
  switch (f) {
    case SbflFormula::Ochiai: return "ochiai";
    case SbflFormula::DStar2: return "dstar2";
    case SbflFormula::Tarantula: return "tarantula";
  }
  return "ochiai";
}

inline SbflFormula parse_formula(std::string_view name) {
  auto n = text::to_lower(name);
  if (n == "ochiai") return SbflFormula::Ochiai;
  if (n == "dstar2" || n == "dstar") return SbflFormula::DStar2;
  if (n == "tarantula") return SbflFormula::Tarantula;
  throw ConfigError("unknown SBFL formula: " + std::string(name));
}

// Suspiciousness of one method. Methods no failing test covers score 0;
// DStar2 with ep + nf = 0 is +infinity.
inline double sbfl_formula(SbflFormula f, const SpectrumCounts& c) {
  if (c.ef == 0) return 0.0;
  const double ef = c.ef, ep = c.ep, nf = c.nf, np = c.np;
  switch (f) {
    case SbflFormula::Ochiai:
      return ef / std::sqrt((ef + nf) * (ef + ep));
    case SbflFormula::DStar2:
      if (ep + nf == 0) return std::numeric_limits<double>::infinity();
      return ef * ef / (ep + nf);
    case SbflFormula::Tarantula: {
      double fail_ratio = ef / (ef + nf);
      double pass_ratio = ep + np > 0 ? ep / (ep + np) : 0.0;
      return fail_ratio / (fail_ratio + pass_ratio);
    }
  }
  return 0.0;
}

namespace detail {

// Descending score, ties by FQN.
inline RankedList rank_scores(std::string technique, std::vector<std::pair<std::string, double>> scored) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  RankedList out{std::move(technique), {}};
  for (auto& [fqn, s] : scored) out.push(std::move(fqn), s);
  return out;
}

}  // namespace detail

inline RankedList sbfl_score(const CoverageSpectrum& spectrum, SbflFormula formula) {
  if (spectrum.failing() == 0) throw PreconditionError("SBFL needs at least one failing test");
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& [m, c] : count_spectrum(spectrum)) scored.emplace_back(m, sbfl_formula(formula, c));
  return detail::rank_scores(std::string(formula_label(formula)), std::move(scored));
}

// ---------------------------------------------------------------------------
// BM25 IRFL with title boosting
// ---------------------------------------------------------------------------

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
  int title_weight = 3;

  void validate() const {
    if (k1 < 0) throw ConfigError("bm25: k1 must be >= 0");
    if (b < 0 || b > 1) throw ConfigError("bm25: b must be in [0, 1]");
    if (title_weight < 1) throw ConfigError("bm25: title_weight must be >= 1");
  }
};

// Lower-cased identifiers plus their camelCase parts, minus stop words.
inline std::vector<std::string> ir_tokens(std::string_view s) {
  static const std::unordered_set<std::string> stop = {
      "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "if", "in", "into", "is",
      "it", "no", "not", "of", "on", "or", "such", "that", "the", "their", "then", "there",
      "these", "they", "this", "to", "was", "will", "with", "i", "me", "my", "we", "you",
      "public", "private", "protected", "static", "final", "void", "return", "new", "class",
      "int", "long", "boolean", "if", "else", "throw", "throws", "import", "package", "null",
      "true", "false", "get", "set"};
  std::vector<std::string> out;
  for (const auto& ident : text::identifiers(s)) {
    auto whole = text::to_lower(ident);
    if (whole.size() > 1 && !stop.count(whole)) out.push_back(whole);
    auto parts = text::split_camel_case(ident);
    if (parts.size() > 1) {
      for (const auto& p : parts) {
        auto lp = text::to_lower(p);
        if (lp.size() > 1 && !stop.count(lp)) out.push_back(lp);
      }
    }
  }
  return out;
}

// Term frequencies and length of one document.
struct Bm25Document {
  std::string id;
  std::unordered_map<std::string, double> tf;
  double length = 0.0;

  static Bm25Document from_tokens(std::string id, const std::vector<std::string>& tokens) {
    Bm25Document d{std::move(id), {}, static_cast<double>(tokens.size())};
    for (const auto& t : tokens) d.tf[t] += 1.0;
    return d;
  }
};

class Bm25 {
 public:
  Bm25(std::vector<Bm25Document> docs, double k1, double b) : docs_(std::move(docs)), k1_(k1), b_(b) {
    double total = 0.0;
    for (const auto& d : docs_) {
      total += d.length;
      for (const auto& [term, _] : d.tf) df_[term] += 1.0;
    }
    avgdl_ = docs_.empty() ? 0.0 : total / static_cast<double>(docs_.size());
  }

  // Non-negative IDF variant: ln(1 + (N - n + 0.5) / (n + 0.5)).
  double idf(const std::string& term) const {
    auto it = df_.find(term);
    double n = it == df_.end() ? 0.0 : it->second;
    double N = static_cast<double>(docs_.size());
    return std::log(1.0 + (N - n + 0.5) / (n + 0.5));
  }

  // Sum over query terms, each weighted by its query frequency.
  double score(const Bm25Document& d, const std::map<std::string, double>& query) const {
    double s = 0.0;
    double norm = avgdl_ > 0 ? d.length / avgdl_ : 0.0;
    for (const auto& [term, qtf] : query) {
      auto it = d.tf.find(term);
      if (it == d.tf.end()) continue;
      double f = it->second;
      s += qtf * idf(term) * f * (k1_ + 1.0) / (f + k1_ * (1.0 - b_ + b_ * norm));
    }
    return s;
  }

  const std::vector<Bm25Document>& documents() const { return docs_; }

 private:
  std::vector<Bm25Document> docs_;
  std::unordered_map<std::string, double> df_;
  double avgdl_ = 0.0;
  double k1_, b_;
};

// Title tokens count `title_weight` times, description tokens once.
inline std::map<std::string, double> boosted_query(const BugReport& report, int title_weight) {
  std::map<std::string, double> q;
  for (const auto& t : ir_tokens(report.title)) q[t] += static_cast<double>(title_weight);
  for (const auto& t : ir_tokens(report.description)) q[t] += 1.0;
  return q;
}

inline Bm25Document method_document(const MethodRecord& m) {
  auto tokens = ir_tokens(m.path_name + " " + m.class_name + " " + m.method_name + " " +
                          text::join(m.arg_types, " "));
  auto body = ir_tokens(m.snippet);
  tokens.insert(tokens.end(), body.begin(), body.end());
  return Bm25Document::from_tokens(m.fqn, tokens);
}

inline RankedList irfl_score(const RepoIndex& index, const std::optional<BugReport>& report,
                             const Bm25Params& params = {}) {
  if (!report) throw PreconditionError("IRFL needs a bug report");
  params.validate();
  std::vector<Bm25Document> docs;
  docs.reserve(index.records().size());
  for (const auto& m : index.records()) docs.push_back(method_document(m));
  Bm25 bm25(std::move(docs), params.k1, params.b);
  auto query = boosted_query(*report, params.title_weight);
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& d : bm25.documents()) scored.emplace_back(d.id, bm25.score(d, query));
  return detail::rank_scores("boostn", std::move(scored));
}

// ---------------------------------------------------------------------------
// Statement-level lists lifted to methods
// ---------------------------------------------------------------------------

struct StatementRef {
  std::string file;
  int line = 0;
};

inline std::vector<StatementRef> statements_from_jsonl(std::string_view content,
                                                       const std::string& what = "statements") {
  std::vector<StatementRef> out;
  std::size_t line_no = 0;
  for (const auto& raw : text::split_lines(content)) {
    ++line_no;
    auto line = text::trim(raw);
    if (line.empty()) continue;
    std::string where = what + ":" + std::to_string(line_no);
    auto j = detail::parse_json(line, where);
    if (!j.is_object()) throw FormatError(where + ": expected object");
    out.push_back({detail::require_string(j, "file", where),
                   static_cast<int>(detail::require_int(j, "line", where))});
  }
  return out;
}

inline std::vector<StatementRef> load_statements(const std::filesystem::path& file) {
  return statements_from_jsonl(text::read_file(file), file.string());
}

namespace detail {

inline bool same_source_file(std::string_view indexed, std::string_view given) {
  if (indexed == given) return true;
  if (given.size() < indexed.size() && indexed[indexed.size() - given.size() - 1] == '/' &&
      indexed.substr(indexed.size() - given.size()) == given)
    return true;
  return given.size() > indexed.size() && given[given.size() - indexed.size() - 1] == '/' &&
         given.substr(given.size() - indexed.size()) == indexed;
}

}  // namespace detail

// Replaces each statement by its enclosing method, drops statements outside
// every method, keeps each method's first occurrence only.
inline RankedList lift_statement_ranks(const std::vector<StatementRef>& statements,
                                       const RepoIndex& index, std::string technique = "sbir") {
  std::unordered_map<std::string, std::vector<const MethodRecord*>> by_file;
  for (const auto& m : index.records()) by_file[m.file].push_back(&m);

  std::vector<std::string> order;
  std::unordered_set<std::string> seen;
  for (const auto& st : statements) {
    const MethodRecord* best = nullptr;
    auto consider = [&](const std::vector<const MethodRecord*>& methods) {
      for (const auto* m : methods) {
        if (!m->line_span.contains(st.line)) continue;
        if (best == nullptr || m->line_span.end - m->line_span.start <
                                   best->line_span.end - best->line_span.start)
          best = m;
      }
    };
    if (auto it = by_file.find(st.file); it != by_file.end()) {
      consider(it->second);
    } else {
      for (const auto& [file, methods] : by_file)
        if (detail::same_source_file(file, st.file)) consider(methods);
    }
    if (best != nullptr && seen.insert(best->fqn).second) order.push_back(best->fqn);
  }
  return RankedList::from_order(std::move(technique), order);
}

// ---------------------------------------------------------------------------
// Space-reduction fusion
// ---------------------------------------------------------------------------

struct FusionConfig {
  std::size_t m = 20;
  std::size_t k = 5;
  std::vector<std::string> technique_order{"sbir", "ochiai", "boostn"};
  std::string llm_technique = "agent4sr";

  void validate() const {
    if (m == 0) throw ConfigError("fusion: m must be >= 1");
    if (k == 0) throw ConfigError("fusion: k must be >= 1");
    if (k > m) throw ConfigError("fusion: k must not exceed m");
  }
};

namespace detail {

struct FusionBlock {
  std::string technique;
  const RankedList* list;
  std::size_t quota = 0;
  std::size_t cursor = 0;  // next position of `list` to examine
  std::vector<std::string> picked;
};

}  // namespace detail

// Concatenates per-technique blocks: non-LLM techniques in configured order
// (unlisted ones after, by name), the LLM agent's list last. The LLM block
// gets k slots and the others split m - k evenly. Duplicates keep their
// first occurrence; a block that cannot fill its quota leaves the spare
// slots to the others, which extend from deeper ranks, so the result holds
// min(m, distinct FQNs) entries.
inline RankedList fuse(const std::map<std::string, RankedList>& lists, const FusionConfig& cfg) {
  cfg.validate();
  if (lists.empty()) throw PreconditionError("fuse needs at least one ranked list");

  std::vector<detail::FusionBlock> blocks;
  std::set<std::string> placed;
  for (const auto& t : cfg.technique_order) {
    if (t == cfg.llm_technique) continue;
    auto it = lists.find(t);
    if (it != lists.end() && !it->second.empty() && placed.insert(t).second)
      blocks.push_back({t, &it->second, 0, 0, {}});
  }
  for (const auto& [t, list] : lists) {
    if (t == cfg.llm_technique || list.empty() || placed.count(t)) continue;
    placed.insert(t);
    blocks.push_back({t, &list, 0, 0, {}});
  }
  const std::size_t non_llm = blocks.size();
  if (auto it = lists.find(cfg.llm_technique); it != lists.end() && !it->second.empty())
    blocks.push_back({cfg.llm_technique, &it->second, 0, 0, {}});

  RankedList fused{"fused", {}};
  if (blocks.empty()) return fused;

  bool has_llm = blocks.size() > non_llm;
  std::size_t rest = cfg.m;
  if (has_llm) {
    std::size_t q = non_llm == 0 ? cfg.m : std::min(cfg.k, cfg.m);
    blocks.back().quota = q;
    rest -= q;
  }
  for (std::size_t i = 0; i < non_llm; ++i)
    blocks[i].quota = rest / non_llm + (i < rest % non_llm ? 1 : 0);

  std::unordered_set<std::string> seen;
  auto take_next = [&](detail::FusionBlock& b) {
    while (b.cursor < b.list->entries.size()) {
      const auto& fqn = b.list->entries[b.cursor++].fqn;
      if (seen.insert(fqn).second) {
        b.picked.push_back(fqn);
        return true;
      }
    }
    return false;
  };

  std::size_t total = 0;
  for (auto& b : blocks)
    while (b.picked.size() < b.quota && take_next(b)) ++total;

  // Backfill spare slots round-robin from deeper ranks, block order first.
  bool progress = true;
  while (total < cfg.m && progress) {
    progress = false;
    for (auto& b : blocks) {
      if (total >= cfg.m) break;
      if (take_next(b)) {
        ++total;
        progress = true;
      }
    }
  }

  for (const auto& b : blocks)
    for (const auto& fqn : b.picked) fused.push(fqn, 1.0 / static_cast<double>(fused.size() + 1), b.technique);
  return fused;
}

}  // namespace flexloc
