#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "flexloc/agents.hpp"
#include "flexloc/error.hpp"
#include "flexloc/http_chat.hpp"
#include "flexloc/text.hpp"

namespace flexloc {

// Everything a run needs besides its inputs. Read from an INI-style file:
//
//   [pipeline]  k, max_calls, min_max_calls, repetition_runs
//   [fusion]    m, technique_order (comma separated), llm_technique
//   [matcher]   edit_distance_threshold, fallback_count
//   [sampling]  temperature, top_p, max_response_tokens
//   [gateway]   url, model, max_attempts, initial_backoff_ms, timeout_seconds, context_limit
//   [toolbox]   output_cap
//   [bm25]      k1, b, title_weight
//   [sbfl]      formula
//   [ranked]    <technique> = <ranked-list file>
//
// The API key is only taken from FLEXLOC_LLM_KEY. Fusion's k follows
// pipeline.k.
struct RunConfig {
  FlexflConfig flexfl;
  HttpGatewaySettings gateway;
  std::map<std::string, std::filesystem::path> ranked_files;
  bool sampling_set = false;  // [sampling] present; repeated runs keep it instead of the stochastic preset

  void validate() const {
    flexfl.agent.pipeline.validate();
    flexfl.agent.matcher.validate();
    flexfl.agent.sampling.validate();
    flexfl.fusion.validate();
    flexfl.bm25.validate();
    if (flexfl.agent.tool_output_cap < 80) throw ConfigError("toolbox: output_cap must be >= 80");
    if (flexfl.fusion.k != flexfl.agent.pipeline.k)
      throw ConfigError("fusion: k must equal pipeline k");
    for (const auto& [t, p] : ranked_files)
      if (!std::filesystem::is_regular_file(p))
        throw ConfigError("ranked list for '" + t + "' not found: " + p.string());
  }
};

namespace detail {

template <class T>
T ini_value(const boost::property_tree::ptree& section, const std::string& where, const std::string& key,
            T fallback) {
  auto v = section.get_optional<std::string>(key);
  if (!v) return fallback;
  std::istringstream in(std::string(text::trim(*v)));
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) throw ConfigError(where + "." + key + ": invalid value '" + *v + "'");
  return out;
}

template <>
inline std::string ini_value<std::string>(const boost::property_tree::ptree& section, const std::string&,
                                          const std::string& key, std::string fallback) {
  auto v = section.get_optional<std::string>(key);
  return v ? std::string(text::trim(*v)) : fallback;
}

inline void check_keys(const boost::property_tree::ptree& section, const std::string& name,
                       const std::set<std::string>& allowed) {
  for (const auto& [key, _] : section)
    if (!allowed.count(key)) throw ConfigError("config: unknown key '" + name + "." + key + "'");
}

}  // namespace detail

inline RunConfig run_config_from_ini(const std::string& content, const std::string& what = "config",
                                     const std::filesystem::path& base_dir = {}) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(content);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(what + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  RunConfig cfg;
  static const std::set<std::string> sections{"pipeline", "fusion",  "matcher", "sampling", "gateway",
                                              "toolbox",  "bm25",    "sbfl",    "ranked"};
  for (const auto& [name, section] : tree) {
    if (!sections.count(name)) throw ConfigError(what + ": unknown section [" + name + "]");
    if (section.empty() && !section.data().empty())
      throw ConfigError(what + ": key '" + name + "' outside any section");
  }
  const pt::ptree empty;
  auto sec = [&](const std::string& n) -> const pt::ptree& {
    auto c = tree.get_child_optional(n);
    return c ? *c : empty;
  };

  auto& p = cfg.flexfl.agent.pipeline;
  const auto& ps = sec("pipeline");
  detail::check_keys(ps, "pipeline", {"k", "max_calls", "min_max_calls", "repetition_runs"});
  p.k = detail::ini_value(ps, "pipeline", "k", p.k);
  p.max_calls = detail::ini_value(ps, "pipeline", "max_calls", p.max_calls);
  p.min_max_calls = detail::ini_value(ps, "pipeline", "min_max_calls", p.min_max_calls);
  p.repetition_runs = detail::ini_value(ps, "pipeline", "repetition_runs", p.repetition_runs);

  auto& f = cfg.flexfl.fusion;
  const auto& fs = sec("fusion");
  detail::check_keys(fs, "fusion", {"m", "technique_order", "llm_technique"});
  f.m = detail::ini_value(fs, "fusion", "m", f.m);
  f.k = p.k;
  if (auto order = fs.get_optional<std::string>("technique_order")) {
    f.technique_order.clear();
    for (const auto& t : text::split_any(*order, ", "))
      if (!t.empty()) f.technique_order.push_back(t);
  }
  f.llm_technique = detail::ini_value<std::string>(fs, "fusion", "llm_technique", f.llm_technique);

  auto& m = cfg.flexfl.agent.matcher;
  const auto& ms = sec("matcher");
  detail::check_keys(ms, "matcher", {"edit_distance_threshold", "fallback_count"});
  m.edit_distance_threshold =
      detail::ini_value(ms, "matcher", "edit_distance_threshold", m.edit_distance_threshold);
  m.fallback_count = detail::ini_value(ms, "matcher", "fallback_count", m.fallback_count);

  auto& s = cfg.flexfl.agent.sampling;
  const auto& ss = sec("sampling");
  detail::check_keys(ss, "sampling", {"temperature", "top_p", "max_response_tokens"});
  s.temperature = detail::ini_value(ss, "sampling", "temperature", s.temperature);
  s.top_p = detail::ini_value(ss, "sampling", "top_p", s.top_p);
  s.max_response_tokens = detail::ini_value(ss, "sampling", "max_response_tokens", s.max_response_tokens);
  cfg.sampling_set = !ss.empty();

  auto& g = cfg.gateway;
  const auto& gs = sec("gateway");
  detail::check_keys(gs, "gateway",
                     {"url", "model", "max_attempts", "initial_backoff_ms", "timeout_seconds", "context_limit"});
  g.url = detail::ini_value<std::string>(gs, "gateway", "url", g.url);
  g.model = detail::ini_value<std::string>(gs, "gateway", "model", g.model);
  g.max_attempts = detail::ini_value(gs, "gateway", "max_attempts", g.max_attempts);
  g.initial_backoff = std::chrono::milliseconds(
      detail::ini_value<long>(gs, "gateway", "initial_backoff_ms", g.initial_backoff.count()));
  g.timeout_seconds = detail::ini_value(gs, "gateway", "timeout_seconds", g.timeout_seconds);
  g.context_limit = detail::ini_value(gs, "gateway", "context_limit", g.context_limit);

  const auto& ts = sec("toolbox");
  detail::check_keys(ts, "toolbox", {"output_cap"});
  cfg.flexfl.agent.tool_output_cap =
      detail::ini_value(ts, "toolbox", "output_cap", cfg.flexfl.agent.tool_output_cap);

  auto& b = cfg.flexfl.bm25;
  const auto& bs = sec("bm25");
  detail::check_keys(bs, "bm25", {"k1", "b", "title_weight"});
  b.k1 = detail::ini_value(bs, "bm25", "k1", b.k1);
  b.b = detail::ini_value(bs, "bm25", "b", b.b);
  b.title_weight = detail::ini_value(bs, "bm25", "title_weight", b.title_weight);

  const auto& sb = sec("sbfl");
  detail::check_keys(sb, "sbfl", {"formula"});
  if (auto formula = sb.get_optional<std::string>("formula")) {
    try {
      cfg.flexfl.sbfl = parse_formula(text::trim(*formula));
    } catch (const Error& e) {
      throw ConfigError(std::string("sbfl.formula: ") + e.what());
    }
  }

  for (const auto& [technique, node] : sec("ranked")) {
    std::filesystem::path file(std::string(text::trim(node.data())));
    if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
    cfg.ranked_files[technique] = file;
  }
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& file) {
  return run_config_from_ini(text::read_file(file), file.string(), file.parent_path());
}

}  // namespace flexloc
