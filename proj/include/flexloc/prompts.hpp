#pragma once

// Prompt templates for both agents. These are reconstructions of the
// published excerpts, not verbatim originals; bump kPromptTemplateVersion
// whenever any wording changes so transcripts stay attributable.

#include <string>
#include <string_view>
#include <vector>

#include "flexloc/ranked_list.hpp"
#include "flexloc/text.hpp"
#include "flexloc/toolbox.hpp"

namespace flexloc::prompts {

inline constexpr std::string_view kPromptTemplateVersion = "flexloc-prompts/1";

inline constexpr std::string_view kCallFormatInstruction =
    "call a function in the format `FunctionName(Argument)` in a single line without any other word";

inline constexpr std::string_view kSummaryLineFormat = "PathName.ClassName.MethodName(ArgTypeList)";

struct Inputs {
  bool report = false;
  bool trigger_tests = false;
  bool candidates = false;
};

inline std::string describe_basis(const Inputs& in) {
  std::vector<std::string> parts;
  if (in.report) parts.emplace_back("the bug report");
  if (in.trigger_tests) parts.emplace_back("the trigger test");
  if (in.candidates) parts.emplace_back("the candidate list");
  if (parts.size() == 1) return parts[0];
  if (parts.size() == 2) return parts[0] + " and " + parts[1];
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += i + 1 == parts.size() ? ", and " : ", ";
    out += parts[i];
  }
  return out;
}

inline std::string render_tool_specs(const std::vector<ToolSpec>& specs) {
  std::string out;
  for (const auto& s : specs) {
    out += "- ";
    out += s.name;
    out += s.argument == "None" ? "()" : "(" + s.argument + ")";
    out += ": ";
    out += s.description;
    out += "\n";
  }
  return out;
}

inline std::string system_prompt(AgentKind kind, const Inputs& in, const std::vector<ToolSpec>& tools,
                                 std::size_t max_calls, std::size_t k) {
  std::string given;
  if (in.report && in.trigger_tests) given = "a bug report and a trigger test with its stack trace";
  else if (in.report) given = "a bug report";
  else given = "a trigger test with its stack trace";

  std::string s = "You are a debugging assistant for a Java software system. You will be given " + given;
  if (kind == AgentKind::LocalizationRefinement)
    s += ", followed by a numbered list of candidate methods suggested by fault localization techniques";
  s += ".\n\nYou can use the following functions to retrieve information from the buggy program:\n";
  s += render_tool_specs(tools);
  s += "\nYour task is to localize the top-" + std::to_string(k) +
       " most suspicious methods based on " + describe_basis(in) +
       " and the information you retrieve.";
  if (kind == AgentKind::LocalizationRefinement)
    s += " Double-check the candidate methods by passing the index of a candidate to "
         "get_code_snippet_of_method.";
  s += " You can call at most " + std::to_string(max_calls) +
       " functions. Call exit() once you are confident about the buggy methods.";
  return s;
}

inline std::string user_prompt(const std::string& report_text, const std::string& tests_text,
                               const RankedList* candidates) {
  std::string s;
  if (!report_text.empty()) s += "The bug report is as follows:\n" + report_text + "\n\n";
  if (!tests_text.empty()) s += "The trigger test is as follows:\n" + tests_text + "\n\n";
  if (candidates != nullptr) {
    s += "The candidate methods are as follows:\n";
    for (const auto& e : candidates->entries) s += std::to_string(e.rank) + ". " + e.fqn + "\n";
    s += "\n";
  }
  s += "First, reason and plan how to use function calls to localize the buggy methods. "
       "Do not call any function yet.";
  return s;
}

inline std::string calls_left(std::size_t n) {
  return "You have " + std::to_string(n) + (n == 1 ? " function call" : " function calls") + " left.";
}

inline std::string first_call_request(std::size_t left) {
  return "Now " + std::string(kCallFormatInstruction) + ". " + calls_left(left);
}

inline std::string next_call_request(const std::string& tool_output, std::size_t left) {
  std::string body = tool_output.empty() ? "(empty result)" : tool_output;
  return body + "\n\nNext, " + std::string(kCallFormatInstruction) +
         ", or call exit() if you have enough information. " + calls_left(left);
}

inline std::string summary_request(std::size_t k) {
  std::string s = "Based on the available information, provide the top-" + std::to_string(k) +
                  " most suspicious methods, one per line, in the following format without any other word:\n";
  for (std::size_t i = 1; i <= k; ++i)
    s += "Top_" + std::to_string(i) + ": " + std::string(kSummaryLineFormat) + "\n";
  return s;
}

inline std::string final_summary_request(const std::string& last_tool_output, std::size_t k) {
  std::string body = last_tool_output.empty() ? "(empty result)" : last_tool_output;
  return body + "\n\nYou have used all function calls. " + summary_request(k);
}

}  // namespace flexloc::prompts
