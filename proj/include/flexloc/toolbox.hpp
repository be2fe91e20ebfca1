#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flexloc/error.hpp"
#include "flexloc/matcher.hpp"
#include "flexloc/ranked_list.hpp"
#include "flexloc/repo_index.hpp"
#include "flexloc/text.hpp"

namespace flexloc {

struct FunctionCall {
  std::string name;
  std::string raw_argument;

  bool operator==(const FunctionCall&) const = default;
};

struct ToolResult {
  std::string text;
  bool is_exit = false;
  bool is_error = false;

  bool operator==(const ToolResult&) const = default;
};

inline constexpr std::string_view kCorrectivePrompt =
    "Please call functions in the right format `FunctionName(Argument).`";

inline constexpr std::size_t kDefaultToolOutputCap = 6000;
inline constexpr std::string_view kDefaultPackageLabel = "(default package)";

struct ToolSpec {
  std::string name;
  std::string argument;  // "None" when the call takes no argument
  std::string description;
};

enum class AgentKind { SpaceReduction, LocalizationRefinement };

inline std::string_view agent_label(AgentKind kind) {
  return kind == AgentKind::SpaceReduction ? "agent4sr" : "agent4lr";
}

// Strips whitespace, one level of matching quotes or backticks, and a
// leading `param=` keyword that models sometimes emit.
inline std::string clean_argument(std::string_view raw) {
  auto s = text::trim(raw);
  auto eq = s.find('=');
  if (eq != std::string_view::npos && eq > 0) {
    auto key = text::trim(s.substr(0, eq));
    bool ident = !key.empty() && text::is_ident_start(key.front());
    for (char c : key) ident = ident && text::is_ident_char(c);
    if (ident) s = text::trim(s.substr(eq + 1));
  }
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'' || s.front() == '`') &&
      s.back() == s.front())
    s = text::trim(s.substr(1, s.size() - 2));
  return std::string(s);
}

// Top-level comma split (commas inside (), <>, [] or quotes do not split).
inline std::vector<std::string> split_arguments(std::string_view raw) {
  std::vector<std::string> out;
  if (text::trim(raw).empty()) return out;
  int depth = 0;
  char quote = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    char c = raw[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') quote = c;
    else if (c == '(' || c == '<' || c == '[') ++depth;
    else if (c == ')' || c == '>' || c == ']') --depth;
    else if (c == ',' && depth == 0) {
      out.push_back(clean_argument(raw.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(clean_argument(raw.substr(start)));
  return out;
}

// Enforces the per-result character cap; the truncation marker is counted
// inside the cap.
inline ToolResult cap_output(ToolResult r, std::size_t cap) {
  if (r.text.size() <= cap) return r;
  std::size_t dropped = r.text.size();
  std::string marker;
  std::size_t keep = cap;
  for (int iter = 0; iter < 3; ++iter) {
    marker = "\n... [output truncated: " + std::to_string(dropped) + " more characters]";
    keep = cap > marker.size() ? cap - marker.size() : 0;
    dropped = r.text.size() - keep;
  }
  r.text.resize(keep);
  r.text += marker;
  return r;
}

// The function calls over one repository index.
class Toolbox {
 public:
  explicit Toolbox(const RepoIndex& index, MatcherConfig matcher = {},
                   std::size_t output_cap = kDefaultToolOutputCap)
      : index_(index), matcher_(std::move(matcher)), cap_(output_cap) {
    matcher_.validate();
    if (cap_ < 80) throw ConfigError("toolbox: output cap must be at least 80 characters");
    for (const auto& p : index_.paths())
      path_list_.push_back(p.empty() ? std::string(kDefaultPackageLabel) : p);
  }

  const RepoIndex& index() const { return index_; }
  std::size_t output_cap() const { return cap_; }

  ToolResult get_paths() const {
    if (path_list_.empty()) return {"no paths", false, false};
    return finish({text::join(path_list_, "\n"), false, false});
  }

  ToolResult get_classes_of_path(std::string_view raw) const {
    auto path = clean_argument(raw);
    if (path.empty()) return error("get_classes_of_path requires a path name");
    if (auto* classes = lookup_path(path)) return finish({text::join(*classes, "\n"), false, false});
    if (path_list_.empty()) return error("No path named '" + path + "': the index is empty.");
    auto m = postprocess_detailed(path, path_list_, matcher_);
    if (m.is_match() && m.names.size() == 1) {
      auto* classes = lookup_path(m.names.front());
      return finish({"Path '" + path + "' not found; classes of " + m.names.front() + ":\n" +
                         text::join(*classes, "\n"),
                     false, false});
    }
    return finish({"No path named '" + path + "'. Did you mean:\n" + text::join(m.names, "\n"),
                   false, true});
  }

  ToolResult get_methods_of_class(std::string_view raw) const {
    auto cls = clean_argument(raw);
    if (cls.empty()) return error("get_methods_of_class requires a class name");
    if (auto* methods = index_.methods_of_class(cls)) return finish({render_methods(*methods), false, false});
    if (index_.class_fqns().empty()) return error("No class named '" + cls + "': the index is empty.");
    auto m = postprocess_detailed(cls, index_.class_fqns(), matcher_);
    if (m.is_match() && m.names.size() == 1) {
      return finish({"Methods of class " + m.names.front() + ":\n" +
                         render_methods(*index_.methods_of_class(m.names.front())),
                     false, false});
    }
    return finish({"No class named '" + cls + "'. Did you mean:\n" + text::join(m.names, "\n"),
                   false, true});
  }

  ToolResult get_code_snippet_of_method(std::string_view raw) const {
    auto name = text::remove_whitespace(clean_argument(raw));
    if (name.empty()) return error("get_code_snippet_of_method requires a method name");
    if (const auto* rec = index_.find_method(name)) return finish({rec->snippet, false, false});
    if (index_.empty()) return error("No method named '" + name + "': the index is empty.");
    auto m = postprocess_detailed(name, index_.all_method_fqns(), matcher_);
    if (m.is_match() && m.names.size() == 1) {
      const auto* rec = index_.find_method(m.names.front());
      return finish({rec->snippet + method_footer(rec->fqn), false, false});
    }
    if (m.is_match()) {
      return finish({"Multiple methods match '" + name +
                         "'. Call get_code_snippet_of_method with one of:\n" +
                         text::join(m.names, "\n"),
                     false, true});
    }
    return finish({"No method named '" + name + "'. The closest methods are:\n" +
                       text::join(m.names, "\n"),
                   false, true});
  }

  // Candidate lookup used by the refinement agent; `i` is 1-based.
  ToolResult get_code_snippet_by_candidate_index(const RankedList& candidates, long long i) const {
    if (i < 1 || i > static_cast<long long>(candidates.size()))
      return range_error(candidates.size(), std::to_string(i));
    const auto& fqn = candidates.entries[static_cast<std::size_t>(i - 1)].fqn;
    const auto* rec = index_.find_method(fqn);
    std::string body = rec != nullptr ? rec->snippet : "// source not available in the index\n";
    return finish({body + method_footer(fqn), false, false});
  }

  ToolResult get_code_snippet_by_candidate_index(const RankedList& candidates,
                                                 std::string_view raw) const {
    auto arg = clean_argument(raw);
    long long i = 0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), i);
    if (arg.empty() || ec != std::errc{} || ptr != arg.data() + arg.size())
      return range_error(candidates.size(), arg);
    return get_code_snippet_by_candidate_index(candidates, i);
  }

  ToolResult find_class(std::string_view raw) const {
    return fuzzy("find_class", raw, index_.class_fqns());
  }

  ToolResult find_method(std::string_view raw) const {
    return fuzzy("find_method", raw, index_.all_method_fqns());
  }

  static ToolResult exit() { return {"", true, false}; }

 private:
  static std::string method_footer(const std::string& fqn) {
    return "// method: " + fqn + "\n";
  }

  const std::set<std::string>* lookup_path(const std::string& path) const {
    if (path == kDefaultPackageLabel) return index_.classes_of_path("");
    return index_.classes_of_path(path);
  }

  static std::string render_methods(const std::vector<MethodRecord>& methods) {
    std::vector<std::string> lines;
    lines.reserve(methods.size());
    for (const auto& m : methods)
      lines.push_back(m.method_name + "(" + text::join(m.arg_types, ",") + ")");
    return text::join(lines, "\n");
  }

  ToolResult fuzzy(std::string_view fn, std::string_view raw,
                   const std::vector<std::string>& entities) const {
    auto arg = clean_argument(raw);
    if (arg.empty()) return error(std::string(fn) + " requires a non-empty name fragment");
    if (entities.empty()) return error(std::string(fn) + ": the index is empty");
    return finish({text::join(postprocess(arg, entities, matcher_), "\n"), false, false});
  }

  static ToolResult range_error(std::size_t n, const std::string& got) {
    return {"Invalid candidate index '" + got + "': expected an integer between 1 and " +
                std::to_string(n) + ".",
            false, true};
  }

  ToolResult error(std::string msg) const { return finish({std::move(msg), false, true}); }
  ToolResult finish(ToolResult r) const { return cap_output(std::move(r), cap_); }

  const RepoIndex& index_;
  MatcherConfig matcher_;
  std::size_t cap_;
  std::vector<std::string> path_list_;
};

// The function calls registered for one agent kind, plus dispatch.
class AgentTools {
 public:
  AgentTools(AgentKind kind, const Toolbox& toolbox, const RankedList* candidates = nullptr)
      : kind_(kind), toolbox_(toolbox), candidates_(candidates) {
    if (kind == AgentKind::LocalizationRefinement && candidates == nullptr)
      throw PreconditionError("refinement tools need a candidate list");
  }

  std::vector<ToolSpec> specs() const {
    if (kind_ == AgentKind::LocalizationRefinement) {
      return {{"get_code_snippet_of_method", "index",
               "Get the code snippet of the Java method at the given index of the candidate list"},
              {"exit", "None", "Exit function calling"}};
    }
    return {{"get_paths", "None", "Get the paths of the Java software system"},
            {"get_classes_of_path", "path_name", "Get the classes in the path of the Java software system"},
            {"get_methods_of_class", "class_name",
             "Get the methods belonging to the class of the Java software system"},
            {"get_code_snippet_of_method", "method_name", "Get the code snippet of the Java method"},
            {"find_class", "class_name", "Find the class through fuzzy search"},
            {"find_method", "method_name", "Find the method through fuzzy search"},
            {"exit", "None", "Exit function calling"}};
  }

  bool is_registered(std::string_view name) const {
    for (const auto& s : specs())
      if (s.name == name) return true;
    return false;
  }

  // Total: unregistered names yield the corrective prompt.
  ToolResult dispatch(const FunctionCall& call) const {
    if (!is_registered(call.name)) return {std::string(kCorrectivePrompt), false, true};
    const auto& n = call.name;
    if (n == "exit") return Toolbox::exit();
    if (kind_ == AgentKind::LocalizationRefinement)
      return toolbox_.get_code_snippet_by_candidate_index(*candidates_, call.raw_argument);
    if (n == "get_paths") return toolbox_.get_paths();
    if (n == "get_classes_of_path") return toolbox_.get_classes_of_path(first_arg(call));
    if (n == "get_methods_of_class") return toolbox_.get_methods_of_class(first_arg(call));
    if (n == "get_code_snippet_of_method") return toolbox_.get_code_snippet_of_method(first_arg(call));
    if (n == "find_class") return toolbox_.find_class(first_arg(call));
    return toolbox_.find_method(first_arg(call));
  }

  AgentKind kind() const { return kind_; }
  const RankedList* candidates() const { return candidates_; }

 private:
  static std::string first_arg(const FunctionCall& call) {
    auto args = split_arguments(call.raw_argument);
    return args.empty() ? std::string{} : args.front();
  }

  AgentKind kind_;
  const Toolbox& toolbox_;
  const RankedList* candidates_;
};

}  // namespace flexloc
