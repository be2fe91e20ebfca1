// flexloc: command-line driver for indexing, localization and evaluation.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "flexloc/agents.hpp"
#include "flexloc/config.hpp"
#include "flexloc/eval.hpp"
#include "flexloc/http_chat.hpp"
#include "flexloc/repo_index.hpp"

#ifndef FLEXLOC_DATA_DIR
#define FLEXLOC_DATA_DIR "fixtures/time25"
#endif

namespace fs = std::filesystem;
using namespace flexloc;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::size_t> k, max_calls, m, repeat;
  std::string sbfl;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "INI-style run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--k", o.k, "methods reported per agent (default 5)");
  cmd->add_option("--max-calls", o.max_calls, "function-call budget MAX (default 10)");
  cmd->add_option("--m", o.m, "candidate list length (default 20)");
  cmd->add_option("--repeat", o.repeat, "independent runs R per agent, aggregated");
  cmd->add_option("--sbfl", o.sbfl, "SBFL formula for --spectrum: ochiai, dstar2, tarantula");
}

RunConfig resolve_config(const CommonOptions& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  auto& p = cfg.flexfl.agent.pipeline;
  if (o.k) p.k = *o.k;
  if (o.max_calls) p.max_calls = *o.max_calls;
  if (o.repeat) p.repetition_runs = *o.repeat;
  if (o.m) cfg.flexfl.fusion.m = *o.m;
  cfg.flexfl.fusion.k = p.k;
  if (!o.sbfl.empty()) cfg.flexfl.sbfl = parse_formula(o.sbfl);
  if (p.repetition_runs > 1 && !cfg.sampling_set) cfg.flexfl.agent.sampling = SamplingConfig::repetition();
  cfg.gateway.apply_environment();
  cfg.validate();
  return cfg;
}

// Chat models for one bug: scripted replays when given, else the HTTP
// gateway shared by every run.
class Models {
 public:
  Models(const std::string& sr_replay, const std::string& lr_replay, const RunConfig& cfg) {
    if (!sr_replay.empty()) sr_ = load_runs(sr_replay);
    if (!lr_replay.empty()) lr_ = load_runs(lr_replay);
    if (sr_replay.empty() || lr_replay.empty()) http_cfg_ = cfg.gateway;
  }

  ChatModel& get(AgentKind kind, std::size_t run) {
    auto& runs = kind == AgentKind::SpaceReduction ? sr_ : lr_;
    if (runs.empty()) {
      if (!http_) http_ = std::make_unique<HttpChatModel>(*http_cfg_);
      return *http_;
    }
    if (run >= runs.size())
      throw PreconditionError(std::string(agent_label(kind)) + " replay holds " +
                              std::to_string(runs.size()) + " run(s); run " + std::to_string(run + 1) +
                              " requested");
    return *runs[run];
  }

  ModelProvider provider() {
    return [this](AgentKind kind, std::size_t run) -> ChatModel& { return get(kind, run); };
  }

 private:
  static std::vector<std::unique_ptr<ReplayChatModel>> load_runs(const std::string& file) {
    std::vector<std::unique_ptr<ReplayChatModel>> out;
    for (auto& script : load_replay_scripts(file)) out.push_back(std::make_unique<ReplayChatModel>(script));
    return out;
  }

  std::vector<std::unique_ptr<ReplayChatModel>> sr_, lr_;
  std::optional<HttpGatewaySettings> http_cfg_;
  std::unique_ptr<HttpChatModel> http_;
};

RepoIndex obtain_index(const std::string& index_file, const std::string& root) {
  if (!index_file.empty()) return load_index(index_file);
  auto built = build_index(root);
  for (const auto& w : built.warnings) std::cerr << "warning: " << w.file << ": " << w.message << "\n";
  return std::move(built.index);
}

std::map<std::string, RankedList> load_external(const RunConfig& cfg, const std::vector<std::string>& flags) {
  std::map<std::string, RankedList> out;
  for (const auto& [t, file] : cfg.ranked_files) out[t] = load_ranked_list(file, t);
  for (const auto& spec : flags) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw ArgumentError("--ranked expects <technique>=<file>, got '" + spec + "'");
    auto t = spec.substr(0, eq);
    out[t] = load_ranked_list(spec.substr(eq + 1), t);
  }
  return out;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

std::string config_echo(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  const auto& p = cfg.flexfl.agent.pipeline;
  j["k"] = p.k;
  j["max_calls"] = p.max_calls;
  j["repetition_runs"] = p.repetition_runs;
  j["m"] = cfg.flexfl.fusion.m;
  j["technique_order"] = cfg.flexfl.fusion.technique_order;
  j["temperature"] = cfg.flexfl.agent.sampling.temperature;
  j["top_p"] = cfg.flexfl.agent.sampling.top_p;
  j["prompt_version"] = std::string(prompts::kPromptTemplateVersion);
  return j.dump();
}

nlohmann::ordered_json result_json(const std::string& bug_id, const RunConfig& cfg, const FlexflResult& r) {
  nlohmann::ordered_json j;
  j["bug_id"] = bug_id;
  j["config"] = nlohmann::ordered_json::parse(config_echo(cfg));
  j["final"] = ranked_list_to_json(r.stage2.final_list);
  j["stage1"] = stage_one_to_json(r.stage1);
  j["stage2"] = stage_two_to_json(r.stage2);
  return j;
}

void print_top(std::ostream& out, const RankedList& list, std::size_t n) {
  for (std::size_t i = 0; i < std::min(n, list.size()); ++i)
    out << "  " << (i + 1) << ". " << list.entries[i].fqn << "\n";
}

// ---------------------------------------------------------------------------
// localize
// ---------------------------------------------------------------------------

struct LocalizeOptions {
  CommonOptions common;
  std::string bug, bugs_dir, index, root, spectrum, replay_sr, replay_lr, out, out_dir, list_out;
  std::vector<std::string> ranked;
  unsigned jobs = 1;
};

struct BugFiles {
  std::string id;
  fs::path bug, spectrum, replay_sr, replay_lr;
  std::map<std::string, fs::path> ranked;
};

// <id>.bug.json plus optional siblings <id>.spectrum.json,
// <id>.sr.replay.json, <id>.lr.replay.json and <id>.<technique>.jsonl.
std::vector<BugFiles> scan_bugs_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("bugs directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::map<std::string, BugFiles> bugs;
  const std::string suffix = ".bug.json";
  for (const auto& f : files) {
    auto name = f.filename().string();
    if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      auto id = name.substr(0, name.size() - suffix.size());
      bugs[id].id = id;
      bugs[id].bug = f;
    }
  }
  for (const auto& f : files) {
    auto name = f.filename().string();
    for (auto& [id, b] : bugs) {
      if (name.rfind(id + ".", 0) != 0) continue;
      auto rest = name.substr(id.size() + 1);
      if (rest == "spectrum.json") b.spectrum = f;
      else if (rest == "sr.replay.json") b.replay_sr = f;
      else if (rest == "lr.replay.json") b.replay_lr = f;
      else if (rest.size() > 6 && rest.ends_with(".jsonl") && rest.find('.') == rest.size() - 6)
        b.ranked[rest.substr(0, rest.size() - 6)] = f;
    }
  }
  std::vector<BugFiles> out;
  for (auto& [id, b] : bugs) out.push_back(std::move(b));
  if (out.empty()) throw ConfigError("no *.bug.json files in " + dir.string());
  return out;
}

FlexflResult localize_one(const BugInfo& bug, const RepoIndex& index, const std::optional<CoverageSpectrum>& spectrum,
                          const std::map<std::string, RankedList>& external, Models& models, const RunConfig& cfg) {
  return run_flexfl(bug, index, spectrum, external, models.provider(), cfg.flexfl);
}

int cmd_localize(const LocalizeOptions& o) {
  auto cfg = resolve_config(o.common);
  auto index = obtain_index(o.index, o.root);

  if (!o.bug.empty()) {
    auto bug = load_bug_info(o.bug);
    std::string id = bug.bug_id.empty() ? fs::path(o.bug).stem().stem().string() : bug.bug_id;
    std::optional<CoverageSpectrum> spectrum;
    if (!o.spectrum.empty()) spectrum = load_spectrum(o.spectrum);
    auto external = load_external(cfg, o.ranked);
    Models models(o.replay_sr, o.replay_lr, cfg);
    auto r = localize_one(bug, index, spectrum, external, models, cfg);
    if (!o.out.empty()) text::write_file(o.out, dump(result_json(id, cfg, r)));
    if (!o.list_out.empty()) save_ranked_list(r.stage2.final_list, o.list_out);
    std::cout << id << ": top-" << cfg.flexfl.agent.pipeline.k << "\n";
    print_top(std::cout, r.stage2.final_list, cfg.flexfl.agent.pipeline.k);
    return 0;
  }

  auto bugs = scan_bugs_dir(o.bugs_dir);
  fs::path out_dir = o.out_dir.empty() ? fs::path("results") : fs::path(o.out_dir);
  std::vector<std::string> errors(bugs.size());
  std::vector<std::string> summaries(bugs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < bugs.size(); i = next++) {
      const auto& b = bugs[i];
      try {
        auto bug = load_bug_info(b.bug);
        std::optional<CoverageSpectrum> spectrum;
        if (!b.spectrum.empty()) spectrum = load_spectrum(b.spectrum);
        auto external = load_external(cfg, o.ranked);
        for (const auto& [t, f] : b.ranked) external[t] = load_ranked_list(f, t);
        Models models(b.replay_sr.empty() ? o.replay_sr : b.replay_sr.string(),
                      b.replay_lr.empty() ? o.replay_lr : b.replay_lr.string(), cfg);
        auto r = localize_one(bug, index, spectrum, external, models, cfg);
        text::write_file(out_dir / (b.id + ".json"), dump(result_json(b.id, cfg, r)));
        save_ranked_list(r.stage2.final_list, out_dir / (b.id + ".jsonl"));
        summaries[i] = b.id + ": " + (r.stage2.final_list.empty() ? "(empty)" : r.stage2.final_list.entries[0].fqn);
      } catch (const std::exception& e) {
        errors[i] = b.id + ": " + e.what();
      }
    }
  };
  unsigned width = std::max(1u, std::min<unsigned>(o.jobs, static_cast<unsigned>(bugs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < width; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int failed = 0;
  for (std::size_t i = 0; i < bugs.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "error: " << errors[i] << "\n";
      ++failed;
    } else {
      std::cout << summaries[i] << "\n";
    }
  }
  std::cout << (bugs.size() - failed) << "/" << bugs.size() << " bugs localized into " << out_dir.string() << "\n";
  return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// stage1 / stage2
// ---------------------------------------------------------------------------

int cmd_stage1(const LocalizeOptions& o) {
  auto cfg = resolve_config(o.common);
  auto index = obtain_index(o.index, o.root);
  auto bug = load_bug_info(o.bug);
  std::optional<CoverageSpectrum> spectrum;
  if (!o.spectrum.empty()) spectrum = load_spectrum(o.spectrum);
  auto external = load_external(cfg, o.ranked);
  Models models(o.replay_sr, o.replay_lr, cfg);
  auto s1 = run_stage_one(bug, index, spectrum, external, models.provider(), cfg.flexfl);
  if (!o.out.empty()) text::write_file(o.out, dump(stage_one_to_json(s1)));
  if (!o.list_out.empty()) save_ranked_list(s1.candidates, o.list_out);
  for (const auto& w : s1.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "candidates (" << s1.candidates.size() << ")\n";
  print_top(std::cout, s1.candidates, s1.candidates.size());
  return 0;
}

int cmd_stage2(const LocalizeOptions& o, const std::string& candidates_file) {
  auto cfg = resolve_config(o.common);
  auto index = obtain_index(o.index, o.root);
  auto bug = load_bug_info(o.bug);
  auto candidates = load_ranked_list(candidates_file, "fused");
  Models models(o.replay_sr, o.replay_lr, cfg);
  auto s2 = run_stage_two(bug, index, candidates, models.provider(), cfg.flexfl);
  if (!o.out.empty()) text::write_file(o.out, dump(stage_two_to_json(s2)));
  if (!o.list_out.empty()) save_ranked_list(s2.final_list, o.list_out);
  std::cout << "top-" << cfg.flexfl.agent.pipeline.k << "\n";
  print_top(std::cout, s2.final_list, cfg.flexfl.agent.pipeline.k);
  return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

int cmd_eval(const std::string& results_dir, const std::string& truth_file, const std::string& out) {
  auto truth = load_truth(truth_file);
  if (!fs::is_directory(results_dir)) throw ConfigError("results directory not found: " + results_dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(results_dir))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  ResultSet results;
  for (const auto& f : files) {
    auto id = f.stem().string();
    results[id] = load_ranked_list(f, "result");
  }
  auto report = evaluate(results, truth);
  if (!out.empty()) text::write_file(out, dump(eval_report_to_json(report)));
  std::cout << render_eval_table(report);
  return 0;
}

// ---------------------------------------------------------------------------
// demo
// ---------------------------------------------------------------------------

std::string first_line(const std::string& s, std::size_t width = 110) {
  auto line = s.substr(0, s.find('\n'));
  if (line.size() > width) line = line.substr(0, width - 3) + "...";
  return line;
}

void print_calls(std::ostream& out, const AgentTranscript& t) {
  std::size_t n = 0;
  for (const auto& c : t.calls) {
    out << "  " << ++n << ". ";
    if (c.corrective) {
      out << first_line(c.model_output, 60) << "\n     -> corrective prompt\n";
      continue;
    }
    out << c.call->name << "(" << c.call->raw_argument << ")\n";
    if (!c.result.is_exit) out << "     -> " << first_line(c.result.text) << "\n";
  }
}

void print_indented(std::ostream& out, const std::string& s) {
  for (const auto& line : text::split_lines(s)) out << "  " << line << "\n";
}

int cmd_demo(const std::string& data_dir, const std::string& out_dir, bool live, const CommonOptions& common) {
  auto cfg = resolve_config(common);
  fs::path data(data_dir);
  fs::path bugs = data / "bugs";
  auto built = build_index(data / "repo");
  const auto& index = built.index;
  auto bug = load_bug_info(bugs / "Time-25.bug.json");
  std::map<std::string, RankedList> external;
  for (const auto* t : {"sbir", "ochiai", "boostn"})
    external[t] = load_ranked_list(bugs / ("Time-25." + std::string(t) + ".jsonl"), t);
  Models models(live ? "" : (bugs / "Time-25.sr.replay.json").string(),
                live ? "" : (bugs / "Time-25.lr.replay.json").string(), cfg);
  auto r = run_flexfl(bug, index, std::nullopt, external, models.provider(), cfg.flexfl);
  auto truth = load_truth(data / "truth.jsonl");

  auto& out = std::cout;
  const auto k = cfg.flexfl.agent.pipeline.k;
  out << "== flexloc walkthrough: Time-25 ==\n";
  out << "index: " << index.all_method_fqns().size() << " methods in " << index.class_fqns().size()
      << " classes\n";
  out << "mode: " << (live ? "live gateway" : "scripted replay") << "\n\n";
  out << "Bug report\n";
  print_indented(out, render_report(*bug.report));
  out << "Trigger test (preprocessed)\n";
  print_indented(out, render_trigger_tests(bug.trigger_tests, effective_prefixes(bug, index)).text);

  out << "\n-- Stage 1: space reduction --\n";
  for (const auto& t : r.stage1.sr_runs) {
    out << "Agent4SR reasoning\n";
    print_indented(out, t.reasoning);
    out << "Agent4SR function calls\n";
    print_calls(out, t);
    out << "Agent4SR summary\n";
    print_indented(out, t.summary_raw);
    out << "Agent4SR predictions after name repair\n";
    for (std::size_t i = 0; i < t.predictions.size(); ++i) {
      out << "  " << (i + 1) << ". " << t.predictions.entries[i].fqn;
      if (i < t.summary_names.size() && t.summary_names[i] != t.predictions.entries[i].fqn)
        out << "   (repaired from " << t.summary_names[i] << ")";
      out << "\n";
    }
  }
  out << "Candidate list (m=" << cfg.flexfl.fusion.m << ")\n";
  for (const auto& e : r.stage1.candidates.entries) {
    char idx[8];
    std::snprintf(idx, sizeof idx, "%3d", e.rank);
    out << "  " << idx << "  " << e.technique << std::string(9 - std::min<std::size_t>(8, e.technique.size()), ' ')
        << e.fqn << "\n";
  }

  out << "\n-- Stage 2: localization refinement --\n";
  for (const auto& t : r.stage2.lr_runs) {
    out << "Agent4LR reasoning\n";
    print_indented(out, t.reasoning);
    out << "Agent4LR function calls\n";
    print_calls(out, t);
    out << "Agent4LR summary\n";
    print_indented(out, t.summary_raw);
  }
  out << "Final top-" << k << "\n";
  print_top(out, r.stage2.final_list, k);

  ResultSet results{{"Time-25", r.stage2.final_list}};
  auto report = evaluate(results, truth);
  const auto& per = report.per_bug.at("Time-25");
  out << "\nBuggy method: " << *truth.at("Time-25").buggy_fqns.begin() << "\n";
  if (per.first_hit_rank) out << "Found at rank " << *per.first_hit_rank << (*per.first_hit_rank == 1 ? " (Top-1 hit)" : "") << "\n";
  else out << "Not found\n";

  if (!out_dir.empty()) {
    fs::path dir(out_dir);
    text::write_file(dir / "Time-25.json", dump(result_json("Time-25", cfg, r)));
    save_ranked_list(r.stage2.final_list, dir / "Time-25.jsonl");
    text::write_file(dir / "eval.json", dump(eval_report_to_json(report)));
  }
  return per.first_hit_rank ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flexloc: two-stage LLM-assisted fault localization"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string root, out;
  auto* index_cmd = app.add_subcommand("index", "Index a Java source tree");
  index_cmd->add_option("--root", root, "source root")->required();
  index_cmd->add_option("--out", out, "index JSON to write")->required();

  LocalizeOptions lo;
  auto add_inputs = [&](CLI::App* cmd, bool replay_sr, bool replay_lr) {
    add_common(cmd, lo.common);
    auto* idx = cmd->add_option("--index", lo.index, "index JSON from `flexloc index`")->check(CLI::ExistingFile);
    auto* rt = cmd->add_option("--root", lo.root, "source root to index on the fly")->check(CLI::ExistingDirectory);
    idx->excludes(rt);
    cmd->add_option("--spectrum", lo.spectrum, "coverage spectrum JSON")->check(CLI::ExistingFile);
    cmd->add_option("--ranked", lo.ranked, "external ranked list, <technique>=<file>");
    if (replay_sr) cmd->add_option("--replay-sr", lo.replay_sr, "scripted Agent4SR replies")->check(CLI::ExistingFile);
    if (replay_lr) cmd->add_option("--replay-lr", lo.replay_lr, "scripted Agent4LR replies")->check(CLI::ExistingFile);
    cmd->add_option("--out", lo.out, "result JSON to write");
    cmd->add_option("--list-out", lo.list_out, "ranked list (JSON lines) to write");
  };

  auto* loc = app.add_subcommand("localize", "Run both stages on one bug or a directory of bugs");
  add_inputs(loc, true, true);
  auto* bug_opt = loc->add_option("--bug", lo.bug, "bug info JSON")->check(CLI::ExistingFile);
  auto* bugs_opt = loc->add_option("--bugs", lo.bugs_dir, "directory of <id>.bug.json files");
  bug_opt->excludes(bugs_opt);
  loc->add_option("--out-dir", lo.out_dir, "output directory for --bugs (default ./results)");
  loc->add_option("--jobs", lo.jobs, "worker threads for --bugs")->check(CLI::PositiveNumber);

  auto* s1 = app.add_subcommand("stage1", "Space reduction: Agent4SR plus fusion into candidates");
  add_inputs(s1, true, false);
  s1->add_option("--bug", lo.bug, "bug info JSON")->required()->check(CLI::ExistingFile);

  std::string candidates;
  auto* s2 = app.add_subcommand("stage2", "Localization refinement over a candidate list");
  add_inputs(s2, false, true);
  s2->add_option("--bug", lo.bug, "bug info JSON")->required()->check(CLI::ExistingFile);
  s2->add_option("--candidates", candidates, "candidate list (JSON lines)")->required()->check(CLI::ExistingFile);

  std::string results_dir, truth_file, eval_out;
  auto* ev = app.add_subcommand("eval", "Top-N, MAP and MRR against ground truth");
  ev->add_option("--results", results_dir, "directory of <bug_id>.jsonl ranked lists")->required();
  ev->add_option("--truth", truth_file, "ground truth JSON lines")->required();
  ev->add_option("--out", eval_out, "report JSON to write");

  std::string data_dir = FLEXLOC_DATA_DIR, demo_out;
  bool live = false;
  CommonOptions demo_common;
  auto* demo = app.add_subcommand("demo", "Time-25 walkthrough on the bundled toy repository");
  demo->add_option("--data", data_dir, "fixture directory")->check(CLI::ExistingDirectory);
  demo->add_option("--out-dir", demo_out, "write transcript, ranked list and eval report here");
  demo->add_flag("--live", live, "use the chat-completions gateway instead of the bundled replays");
  add_common(demo, demo_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*index_cmd) {
      auto built = build_index(root);
      for (const auto& w : built.warnings) std::cerr << "warning: " << w.file << ": " << w.message << "\n";
      save_index(built.index, out);
      std::cout << "indexed " << built.index.all_method_fqns().size() << " methods from " << root << "\n";
      return 0;
    }
    if (*loc || *s1 || *s2) {
      if (lo.index.empty() && lo.root.empty()) {
        std::cerr << "error: one of --index or --root is required\n";
        return 2;
      }
      if (*loc) {
        if (lo.bug.empty() && lo.bugs_dir.empty()) {
          std::cerr << "error: one of --bug or --bugs is required\n";
          return 2;
        }
        return cmd_localize(lo);
      }
      if (*s1) return cmd_stage1(lo);
      return cmd_stage2(lo, candidates);
    }
    if (*ev) return cmd_eval(results_dir, truth_file, eval_out);
    if (*demo) return cmd_demo(data_dir, demo_out, live, demo_common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
