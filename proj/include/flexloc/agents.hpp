#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "flexloc/baseline_fl.hpp"
#include "flexloc/bug_input.hpp"
#include "flexloc/error.hpp"
#include "flexloc/llm_gateway.hpp"
#include "flexloc/matcher.hpp"
#include "flexloc/prompts.hpp"
#include "flexloc/ranked_list.hpp"
#include "flexloc/repo_index.hpp"
#include "flexloc/toolbox.hpp"

namespace flexloc {

struct PipelineConfig {
  std::size_t k = 5;
  std::size_t max_calls = 10;  // MAX
  std::size_t min_max_calls = 1;
  std::size_t repetition_runs = 1;  // R

  void validate() const {
    if (k < 1) throw ConfigError("pipeline: k must be >= 1");
    if (min_max_calls < 1) throw ConfigError("pipeline: min_max_calls must be >= 1");
    if (max_calls < min_max_calls) throw ConfigError("pipeline: max_calls must be >= min_max_calls");
    if (repetition_runs < 1) throw ConfigError("pipeline: repetition_runs must be >= 1");
  }
};

struct AgentSettings {
  PipelineConfig pipeline;
  MatcherConfig matcher;
  SamplingConfig sampling;
  std::size_t tool_output_cap = kDefaultToolOutputCap;
};

// ---------------------------------------------------------------------------
// Parsing model output
// ---------------------------------------------------------------------------

// First `Name(...)` in the message with balanced parentheses; parentheses
// inside quoted strings do not count. Code fences and surrounding prose are
// ignored.
inline std::optional<FunctionCall> parse_function_call(std::string_view msg) {
  for (std::size_t i = 0; i < msg.size(); ++i) {
    if (!text::is_ident_start(msg[i]) || (i > 0 && text::is_ident_char(msg[i - 1]))) continue;
    std::size_t j = i;
    while (j < msg.size() && text::is_ident_char(msg[j])) ++j;
    if (j >= msg.size() || msg[j] != '(') {
      i = j - 1;
      continue;
    }
    int depth = 0;
    char quote = 0;
    std::size_t close = std::string_view::npos;
    for (std::size_t p = j; p < msg.size(); ++p) {
      char c = msg[p];
      if (quote) {
        if (c == '\\') ++p;
        else if (c == quote) quote = 0;
        continue;
      }
      if (c == '"' || (c == '\'' && p > j && !text::is_ident_char(msg[p - 1]))) quote = c;
      else if (c == '(') ++depth;
      else if (c == ')' && --depth == 0) {
        close = p;
        break;
      }
    }
    if (close == std::string_view::npos) {
      i = j;
      continue;
    }
    return FunctionCall{std::string(msg.substr(i, j - i)),
                        std::string(text::trim(msg.substr(j + 1, close - j - 1)))};
  }
  return std::nullopt;
}

namespace detail {

inline std::string clean_summary_name(std::string_view raw) {
  std::string s;
  for (char c : raw)
    if (c != '`' && c != '*' && c != '"') s.push_back(c);
  auto v = text::trim(s);
  auto open = v.find('(');
  if (open != std::string_view::npos) {
    int depth = 0;
    for (std::size_t p = open; p < v.size(); ++p) {
      if (v[p] == '(') ++depth;
      else if (v[p] == ')' && --depth == 0) {
        v = v.substr(0, p + 1);
        break;
      }
    }
    return text::remove_whitespace(v);
  }
  auto sp = v.find_first_of(" \t");
  if (sp != std::string_view::npos) v = v.substr(0, sp);
  while (!v.empty() && (v.back() == '.' || v.back() == ',' || v.back() == ';')) v.remove_suffix(1);
  return std::string(v);
}

}  // namespace detail

// Lines of the form `Top_<i>: name` (also `Top-1`, `Top 1`, any case),
// ordered by i; the first line for each i wins; at most k names.
inline std::vector<std::string> parse_summary(std::string_view summary, std::size_t k) {
  static const std::regex line_re(R"(^[\s>#*\-]*top\s*[_\- ]?\s*(\d+)\s*\**\s*[:：]\s*(.*)$)",
                                  std::regex::icase);
  std::map<long, std::string> by_index;
  for (const auto& line : text::split_lines(summary)) {
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) continue;
    long i = 0;
    try {
      i = std::stol(m[1].str());
    } catch (const std::exception&) {
      continue;
    }
    auto name = detail::clean_summary_name(m[2].str());
    if (name.empty() || by_index.count(i)) continue;
    by_index.emplace(i, std::move(name));
  }
  std::vector<std::string> out;
  for (auto& [i, name] : by_index) {
    if (out.size() >= k) break;
    out.push_back(std::move(name));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Agent runs
// ---------------------------------------------------------------------------

struct CallRecord {
  std::string model_output;
  std::optional<FunctionCall> call;  // empty when the output held no call
  ToolResult result;
  bool corrective = false;
};

struct AgentTranscript {
  AgentKind kind = AgentKind::SpaceReduction;
  std::vector<ChatMessage> messages;
  std::vector<CallRecord> calls;
  std::string reasoning;
  std::string summary_raw;
  std::vector<std::string> summary_names;
  RankedList predictions;
  std::vector<std::string> off_list;  // refinement predictions outside the candidates
  std::size_t max_used = 0;
  std::size_t reruns = 0;
  std::size_t gateway_calls = 0;
  bool exited = false;
  bool overflow = false;
  std::vector<std::string> warnings;
};

namespace detail {

class AgentRun {
 public:
  AgentRun(AgentKind kind, const BugInfo& bug, const RepoIndex& index, const RankedList* candidates,
           ChatModel& model, const AgentSettings& settings)
      : kind_(kind),
        bug_(bug),
        index_(index),
        candidates_(candidates),
        model_(model),
        settings_(settings),
        toolbox_(index, settings.matcher, settings.tool_output_cap),
        tools_(kind, toolbox_, candidates) {}

  AgentTranscript run() {
    AgentTranscript t;
    t.kind = kind_;
    std::size_t max_calls = settings_.pipeline.max_calls;
    std::size_t reruns = 0;
    std::size_t gateway_calls = 0;
    while (true) {
      t = AgentTranscript{};
      t.kind = kind_;
      t.max_used = max_calls;
      t.reruns = reruns;
      try {
        attempt(t);
        t.gateway_calls += gateway_calls;
        return t;
      } catch (const ContextOverflowError&) {
        gateway_calls += t.gateway_calls;
        if (max_calls > settings_.pipeline.min_max_calls) {
          --max_calls;
          ++reruns;
          continue;
        }
        t.gateway_calls = gateway_calls;
        t.overflow = true;
        t.predictions = RankedList{std::string(agent_label(kind_)), {}};
        return t;
      }
    }
  }

 private:
  ChatMessage ask(AgentTranscript& t, std::string user_content) {
    t.messages.push_back({Role::User, std::move(user_content)});
    ++t.gateway_calls;
    auto reply = model_.complete(t.messages, settings_.sampling);
    reply.role = Role::Assistant;
    t.messages.push_back(reply);
    return reply;
  }

  void attempt(AgentTranscript& t) {
    const auto& pc = settings_.pipeline;
    prompts::Inputs inputs{bug_.has_report(), bug_.has_trigger_tests(), candidates_ != nullptr};
    std::string report_text = bug_.report ? render_report(*bug_.report) : std::string{};
    std::string tests_text;
    if (bug_.has_trigger_tests()) {
      auto pre = render_trigger_tests(bug_.trigger_tests, effective_prefixes(bug_, index_));
      tests_text = std::move(pre.text);
      t.warnings = std::move(pre.warnings);
    }

    // Step 1: task assignment.
    t.messages.push_back(
        {Role::System, prompts::system_prompt(kind_, inputs, tools_.specs(), t.max_used, pc.k)});
    t.reasoning = ask(t, prompts::user_prompt(report_text, tests_text, candidates_)).content;

    // Step 2: function-call loop, at most MAX iterations. A corrective turn
    // uses up an iteration.
    std::string request = prompts::first_call_request(t.max_used);
    std::optional<std::string> pending_output;
    for (std::size_t used = 0; used < t.max_used; ++used) {
      auto reply = ask(t, std::move(request));
      CallRecord rec;
      rec.model_output = reply.content;
      rec.call = parse_function_call(reply.content);
      if (!rec.call || !tools_.is_registered(rec.call->name)) {
        rec.corrective = true;
        rec.result = {std::string(kCorrectivePrompt), false, true};
      } else {
        rec.result = tools_.dispatch(*rec.call);
      }
      t.calls.push_back(rec);
      if (rec.result.is_exit) {
        t.exited = true;
        pending_output.reset();
        break;
      }
      std::size_t left = t.max_used - used - 1;
      if (rec.corrective) {
        request = std::string(kCorrectivePrompt);
        pending_output = rec.result.text;
      } else {
        request = prompts::next_call_request(rec.result.text, left);
        pending_output = rec.result.text;
      }
    }

    // Step 3: summarization.
    std::string summary_req = pending_output ? prompts::final_summary_request(*pending_output, pc.k)
                                             : prompts::summary_request(pc.k);
    t.summary_raw = ask(t, std::move(summary_req)).content;
    t.summary_names = parse_summary(t.summary_raw, pc.k);
    t.predictions = repair_predictions(t.summary_names);
    if (candidates_ != nullptr) {
      for (const auto& e : t.predictions.entries)
        if (!candidates_->contains(e.fqn)) t.off_list.push_back(e.fqn);
    }
  }

  RankedList repair_predictions(const std::vector<std::string>& names) const {
    RankedList out{std::string(agent_label(kind_)), {}};
    if (index_.empty()) return out;
    std::unordered_set<std::string> seen;
    for (const auto& n : names) {
      auto repaired = postprocess(n, index_.all_method_fqns(), settings_.matcher);
      if (repaired.empty() || !seen.insert(repaired.front()).second) continue;
      out.push(repaired.front(), 1.0 / static_cast<double>(out.size() + 1));
    }
    return out;
  }

  AgentKind kind_;
  const BugInfo& bug_;
  const RepoIndex& index_;
  const RankedList* candidates_;
  ChatModel& model_;
  const AgentSettings& settings_;
  Toolbox toolbox_;
  AgentTools tools_;
};

}  // namespace detail

// One agent conversation: task assignment, function-call loop, summary.
// A context overflow restarts the run with MAX decreased by one until the
// floor is reached; at the floor the transcript is returned with
// `overflow` set and no predictions.
inline AgentTranscript run_agent(AgentKind kind, const BugInfo& bug, const RepoIndex& index,
                                 const RankedList* candidates, ChatModel& model,
                                 const AgentSettings& settings) {
  settings.pipeline.validate();
  settings.matcher.validate();
  settings.sampling.validate();
  bug.validate();
  if (kind == AgentKind::LocalizationRefinement && candidates == nullptr)
    throw PreconditionError("the refinement agent needs a candidate list");
  return detail::AgentRun(kind, bug, index, candidates, model, settings).run();
}

// ---------------------------------------------------------------------------
// Repetition aggregation
// ---------------------------------------------------------------------------

struct RepetitionRun {
  std::vector<std::vector<std::string>> runs;  // r_i, best first
};

// score(m) = (1/R) * sum_i [m in r_i] / (|r_i| * rank_i(m)); methods absent
// from every run are left out. Descending score, ties by FQN.
inline RankedList aggregate_repetitions(const RepetitionRun& rep, std::string technique = "aggregate") {
  if (rep.runs.empty()) throw PreconditionError("aggregate_repetitions needs R >= 1");
  const double R = static_cast<double>(rep.runs.size());
  std::map<std::string, double> score;
  for (const auto& r : rep.runs) {
    std::unordered_set<std::string> seen;
    const double size = static_cast<double>(r.size());
    for (std::size_t pos = 0; pos < r.size(); ++pos) {
      if (!seen.insert(r[pos]).second) throw ArgumentError("repetition run repeats " + r[pos]);
      score[r[pos]] += 1.0 / (size * static_cast<double>(pos + 1));
    }
  }
  std::vector<std::pair<std::string, double>> scored;
  for (auto& [m, s] : score) scored.emplace_back(m, s / R);
  return detail::rank_scores(std::move(technique), std::move(scored));
}

// ---------------------------------------------------------------------------
// Two-stage pipeline
// ---------------------------------------------------------------------------

struct FlexflConfig {
  AgentSettings agent;
  FusionConfig fusion;
  Bm25Params bm25;
  SbflFormula sbfl = SbflFormula::Ochiai;
};

// Supplies the chat model for run `run` (0-based) of the given agent. The
// provider owns the models; each run must get its own replay backend.
using ModelProvider = std::function<ChatModel&(AgentKind, std::size_t run)>;

struct StageOneResult {
  std::vector<AgentTranscript> sr_runs;
  RankedList agent4sr;
  std::map<std::string, RankedList> technique_lists;  // non-LLM inputs to fusion
  RankedList candidates;
  std::vector<std::string> warnings;
};

struct StageTwoResult {
  std::vector<AgentTranscript> lr_runs;
  RankedList agent4lr;
  RankedList final_list;
};

struct FlexflResult {
  StageOneResult stage1;
  StageTwoResult stage2;
};

namespace detail {

inline RankedList combine_runs(const std::vector<AgentTranscript>& runs, AgentKind kind) {
  if (runs.size() == 1) return runs.front().predictions;
  RepetitionRun rep;
  for (const auto& t : runs) rep.runs.push_back(t.predictions.fqns());
  return aggregate_repetitions(rep, std::string(agent_label(kind)));
}

inline std::vector<AgentTranscript> run_repeated(AgentKind kind, const BugInfo& bug,
                                                 const RepoIndex& index, const RankedList* candidates,
                                                 const ModelProvider& models,
                                                 const AgentSettings& settings) {
  std::vector<AgentTranscript> runs;
  for (std::size_t r = 0; r < settings.pipeline.repetition_runs; ++r)
    runs.push_back(run_agent(kind, bug, index, candidates, models(kind, r), settings));
  return runs;
}

}  // namespace detail

// Space reduction: the search agent plus every available non-LLM list,
// fused into the candidate list. Externally supplied lists take precedence
// over computed ones with the same technique label.
inline StageOneResult run_stage_one(const BugInfo& bug, const RepoIndex& index,
                                    const std::optional<CoverageSpectrum>& spectrum,
                                    const std::map<std::string, RankedList>& external,
                                    const ModelProvider& models, const FlexflConfig& cfg) {
  bug.validate();
  StageOneResult out;
  for (const auto& [label, list] : external) {
    auto copy = list;
    copy.technique = label;
    out.technique_lists[label] = std::move(copy);
  }
  std::string sbfl_label(formula_label(cfg.sbfl));
  if (spectrum && !out.technique_lists.count(sbfl_label)) {
    auto resolved = *spectrum;
    auto w = resolve_spectrum(resolved, index);
    out.warnings.insert(out.warnings.end(), w.begin(), w.end());
    if (resolved.failing() > 0) out.technique_lists[sbfl_label] = sbfl_score(resolved, cfg.sbfl);
    else out.warnings.push_back("spectrum has no failing test; SBFL skipped");
  }
  if (bug.report && !out.technique_lists.count("boostn"))
    out.technique_lists["boostn"] = irfl_score(index, bug.report, cfg.bm25);

  out.sr_runs = detail::run_repeated(AgentKind::SpaceReduction, bug, index, nullptr, models, cfg.agent);
  out.agent4sr = detail::combine_runs(out.sr_runs, AgentKind::SpaceReduction);

  auto lists = out.technique_lists;
  lists[cfg.fusion.llm_technique] = out.agent4sr;
  out.candidates = fuse(lists, cfg.fusion);
  return out;
}

// Localization refinement over the candidate list. The final list is the
// refinement agent's ranking followed by the remaining candidates in
// candidate order, up to m entries.
inline StageTwoResult run_stage_two(const BugInfo& bug, const RepoIndex& index,
                                    const RankedList& candidates, const ModelProvider& models,
                                    const FlexflConfig& cfg) {
  StageTwoResult out;
  out.lr_runs = detail::run_repeated(AgentKind::LocalizationRefinement, bug, index, &candidates, models,
                                     cfg.agent);
  out.agent4lr = detail::combine_runs(out.lr_runs, AgentKind::LocalizationRefinement);
  out.final_list.technique = "flexfl";
  std::unordered_set<std::string> seen;
  for (const auto& e : out.agent4lr.entries)
    if (seen.insert(e.fqn).second)
      out.final_list.push(e.fqn, 1.0 / static_cast<double>(out.final_list.size() + 1), e.technique);
  for (const auto& e : candidates.entries) {
    if (out.final_list.size() >= cfg.fusion.m) break;
    if (seen.insert(e.fqn).second)
      out.final_list.push(e.fqn, 1.0 / static_cast<double>(out.final_list.size() + 1), e.technique);
  }
  return out;
}

inline FlexflResult run_flexfl(const BugInfo& bug, const RepoIndex& index,
                               const std::optional<CoverageSpectrum>& spectrum,
                               const std::map<std::string, RankedList>& external,
                               const ModelProvider& models, const FlexflConfig& cfg) {
  FlexflResult r;
  r.stage1 = run_stage_one(bug, index, spectrum, external, models, cfg);
  r.stage2 = run_stage_two(bug, index, r.stage1.candidates, models, cfg);
  return r;
}

// ---------------------------------------------------------------------------
// JSON export
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json transcript_to_json(const AgentTranscript& t) {
  nlohmann::ordered_json j;
  j["agent"] = std::string(agent_label(t.kind));
  j["prompt_version"] = std::string(prompts::kPromptTemplateVersion);
  j["max_used"] = t.max_used;
  j["reruns"] = t.reruns;
  j["gateway_calls"] = t.gateway_calls;
  j["exited"] = t.exited;
  j["overflow"] = t.overflow;
  j["reasoning"] = t.reasoning;
  auto& calls = j["calls"] = nlohmann::ordered_json::array();
  for (const auto& c : t.calls) {
    nlohmann::ordered_json cj;
    cj["model_output"] = c.model_output;
    if (c.call) {
      cj["name"] = c.call->name;
      cj["argument"] = c.call->raw_argument;
    } else {
      cj["name"] = nullptr;
      cj["argument"] = nullptr;
    }
    cj["result"] = c.result.text;
    cj["is_exit"] = c.result.is_exit;
    cj["is_error"] = c.result.is_error;
    cj["corrective"] = c.corrective;
    calls.push_back(std::move(cj));
  }
  j["summary_raw"] = t.summary_raw;
  j["summary_names"] = t.summary_names;
  j["predictions"] = ranked_list_to_json(t.predictions);
  j["off_list"] = t.off_list;
  j["warnings"] = t.warnings;
  auto& msgs = j["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : t.messages) msgs.push_back(message_to_json(m));
  return j;
}

inline nlohmann::ordered_json stage_one_to_json(const StageOneResult& s) {
  nlohmann::ordered_json j;
  auto& lists = j["technique_lists"] = nlohmann::ordered_json::object();
  for (const auto& [label, list] : s.technique_lists) lists[label] = ranked_list_to_json(list);
  j["agent4sr"] = ranked_list_to_json(s.agent4sr);
  j["candidates"] = ranked_list_to_json(s.candidates);
  auto& runs = j["agent4sr_runs"] = nlohmann::ordered_json::array();
  for (const auto& t : s.sr_runs) runs.push_back(transcript_to_json(t));
  j["warnings"] = s.warnings;
  return j;
}

inline nlohmann::ordered_json stage_two_to_json(const StageTwoResult& s) {
  nlohmann::ordered_json j;
  j["agent4lr"] = ranked_list_to_json(s.agent4lr);
  j["final"] = ranked_list_to_json(s.final_list);
  auto& runs = j["agent4lr_runs"] = nlohmann::ordered_json::array();
  for (const auto& t : s.lr_runs) runs.push_back(transcript_to_json(t));
  return j;
}

}  // namespace flexloc
