#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "flexloc/error.hpp"
#include "flexloc/repo_index.hpp"
#include "flexloc/text.hpp"

namespace flexloc {

struct BugReport {
  std::string title;
  std::string description;
};

struct StackFrame {
  std::string fqn;  // Class.method, without the (File:line) suffix
  std::string file;
  int line = 0;
};

struct TriggerTest {
  std::string source;  // the test method as written
  std::vector<StackFrame> stack_trace;  // innermost frame first
  std::string exception_message;
  std::optional<int> start_line;  // line of `source`'s first line in its file
};

struct BugInfo {
  std::string bug_id;
  std::optional<BugReport> report;
  std::vector<TriggerTest> trigger_tests;
  std::vector<std::string> project_prefixes;

  bool has_report() const { return report.has_value(); }
  bool has_trigger_tests() const { return !trigger_tests.empty(); }

  void validate() const {
    if (!has_report() && !has_trigger_tests())
      throw FormatError("bug info must contain at least one of 'report' or 'trigger_tests'");
  }
};

inline constexpr std::string_view kFailureSentence =
    "The last line shown above failed with the following stack trace.";
inline constexpr std::string_view kUntruncatedFailureSentence =
    "The test above failed with the following stack trace.";

inline std::string render_report(const BugReport& report) {
  return "Title: " + report.title + "\nDescription: " + report.description;
}

// `fqn` belongs to the program when it equals a prefix or extends one at a
// '.' boundary.
inline bool belongs_to_program(std::string_view fqn, const std::vector<std::string>& prefixes) {
  for (const auto& p : prefixes) {
    if (p.empty()) continue;
    if (fqn.size() >= p.size() && fqn.compare(0, p.size(), p) == 0 &&
        (fqn.size() == p.size() || fqn[p.size()] == '.'))
      return true;
  }
  return false;
}

inline std::vector<StackFrame> filter_frames(const std::vector<StackFrame>& frames,
                                             const std::vector<std::string>& prefixes) {
  std::vector<StackFrame> kept;
  for (const auto& f : frames)
    if (belongs_to_program(f.fqn, prefixes)) kept.push_back(f);
  return kept;
}

inline std::string render_frame(const StackFrame& f) {
  return "at " + f.fqn + "(" + f.file + ":" + std::to_string(f.line) + ")";
}

// Name of the first method declared in `source`: the identifier right before
// the first '('.
inline std::string test_method_name(std::string_view source) {
  auto paren = source.find('(');
  if (paren == std::string_view::npos) return {};
  auto end = paren;
  while (end > 0 && text::is_space(source[end - 1])) --end;
  auto begin = end;
  while (begin > 0 && text::is_ident_char(source[begin - 1])) --begin;
  return std::string(source.substr(begin, end - begin));
}

namespace detail {

inline std::string render_test_block(const std::vector<std::string>& source_lines,
                                     std::string_view sentence, const std::string& message,
                                     const std::vector<StackFrame>& frames) {
  std::string out = text::join(source_lines, "\n");
  out += "\n";
  out += sentence;
  if (!message.empty()) {
    out += "\n";
    out += message;
  }
  for (const auto& f : frames) {
    out += "\n";
    out += render_frame(f);
  }
  return out;
}

inline std::string frame_method(const std::string& fqn) {
  auto dot = fqn.rfind('.');
  return dot == std::string::npos ? fqn : fqn.substr(dot + 1);
}

}  // namespace detail

// The trigger test exactly as supplied: full source, every frame.
inline std::string render_trigger_test_raw(const TriggerTest& test) {
  return detail::render_test_block(text::split_lines(test.source), kFailureSentence,
                                   test.exception_message, test.stack_trace);
}

struct PreprocessedTest {
  std::string text;
  std::optional<int> truncated_after;  // 1-based line within the source
  std::vector<std::string> warnings;
};

// Drops frames outside the program, then cuts the test source after the
// line of the innermost retained frame that lies inside the test method.
// The exception message is kept verbatim.
inline PreprocessedTest preprocess_trigger_test(const TriggerTest& test,
                                                const std::vector<std::string>& prefixes) {
  if (test.stack_trace.empty()) throw PreconditionError("trigger test has an empty stack trace");
  PreprocessedTest out;
  auto frames = filter_frames(test.stack_trace, prefixes);
  auto lines = text::split_lines(test.source);
  auto method = test_method_name(test.source);

  std::optional<int> cut;
  if (test.start_line) {
    for (const auto& f : frames) {
      if (detail::frame_method(f.fqn) != method) continue;
      int rel = f.line - *test.start_line + 1;
      if (rel >= 1 && rel <= static_cast<int>(lines.size())) {
        cut = rel;
        break;
      }
    }
  }
  if (cut) {
    lines.resize(static_cast<std::size_t>(*cut));
    out.truncated_after = cut;
    out.text = detail::render_test_block(lines, kFailureSentence, test.exception_message, frames);
  } else {
    out.warnings.push_back(test.start_line
                               ? "no retained stack frame lies inside test '" + method +
                                     "'; keeping the full test source"
                               : "test '" + method +
                                     "' has no start_line; keeping the full test source");
    out.text =
        detail::render_test_block(lines, kUntruncatedFailureSentence, test.exception_message, frames);
  }
  return out;
}

// Every test preprocessed independently, separated by a blank line.
inline PreprocessedTest render_trigger_tests(const std::vector<TriggerTest>& tests,
                                             const std::vector<std::string>& prefixes) {
  PreprocessedTest out;
  for (const auto& t : tests) {
    auto p = preprocess_trigger_test(t, prefixes);
    if (!out.text.empty()) out.text += "\n\n";
    out.text += p.text;
    out.warnings.insert(out.warnings.end(), p.warnings.begin(), p.warnings.end());
  }
  return out;
}

// Package prefixes owned by the program, taken from the index when the bug
// info does not list them.
inline std::vector<std::string> effective_prefixes(const BugInfo& bug, const RepoIndex& index) {
  if (!bug.project_prefixes.empty()) return bug.project_prefixes;
  std::vector<std::string> out;
  for (const auto& p : index.paths())
    if (!p.empty()) out.push_back(p);
  return out;
}

inline BugInfo bug_info_from_json(std::string_view content, const std::string& what = "bug info") {
  auto doc = detail::parse_json(content, what);
  if (!doc.is_object()) throw FormatError(what + ": expected JSON object");
  BugInfo bug;
  if (auto it = doc.find("bug_id"); it != doc.end()) {
    if (!it->is_string()) throw FormatError(what + ".bug_id: expected string");
    bug.bug_id = it->get<std::string>();
  }
  if (auto it = doc.find("report"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) throw FormatError(what + ".report: expected object");
    BugReport r;
    r.title = detail::require_string(*it, "title", what + ".report");
    if (auto d = it->find("description"); d != it->end() && !d->is_null()) {
      if (!d->is_string()) throw FormatError(what + ".report.description: expected string");
      r.description = d->get<std::string>();
    }
    bug.report = std::move(r);
  }
  if (auto it = doc.find("trigger_tests"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw FormatError(what + ".trigger_tests: expected array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      std::string where = what + ".trigger_tests[" + std::to_string(i) + "]";
      const auto& t = (*it)[i];
      if (!t.is_object()) throw FormatError(where + ": expected object");
      TriggerTest test;
      test.source = detail::require_string(t, "source", where);
      const auto& trace = detail::require(t, "stack_trace", where);
      if (!trace.is_array()) throw FormatError(where + ".stack_trace: expected array");
      if (trace.empty()) throw FormatError(where + ".stack_trace: must not be empty");
      for (std::size_t k = 0; k < trace.size(); ++k) {
        std::string fw = where + ".stack_trace[" + std::to_string(k) + "]";
        if (!trace[k].is_object()) throw FormatError(fw + ": expected object");
        StackFrame f;
        f.fqn = detail::require_string(trace[k], "fqn", fw);
        f.file = detail::require_string(trace[k], "file", fw);
        f.line = static_cast<int>(detail::require_int(trace[k], "line", fw));
        test.stack_trace.push_back(std::move(f));
      }
      if (auto m = t.find("exception_message"); m != t.end() && !m->is_null()) {
        if (!m->is_string()) throw FormatError(where + ".exception_message: expected string");
        test.exception_message = m->get<std::string>();
      }
      if (auto s = t.find("start_line"); s != t.end() && !s->is_null()) {
        if (!s->is_number_integer()) throw FormatError(where + ".start_line: expected integer");
        test.start_line = s->get<int>();
      }
      bug.trigger_tests.push_back(std::move(test));
    }
  }
  if (auto it = doc.find("project_prefixes"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw FormatError(what + ".project_prefixes: expected array");
    for (const auto& p : *it) {
      if (!p.is_string()) throw FormatError(what + ".project_prefixes: expected strings");
      bug.project_prefixes.push_back(p.get<std::string>());
    }
  }
  try {
    bug.validate();
  } catch (const FormatError& e) {
    throw FormatError(what + ": " + e.what());
  }
  return bug;
}

inline BugInfo load_bug_info(const std::filesystem::path& file) {
  return bug_info_from_json(text::read_file(file), file.string());
}

}  // namespace flexloc
