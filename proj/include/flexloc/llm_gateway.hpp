#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "flexloc/error.hpp"
#include "flexloc/text.hpp"

namespace flexloc {

enum class Role { System, User, Assistant };

inline std::string_view role_name(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

struct ChatMessage {
  Role role = Role::User;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct SamplingConfig {
  double temperature = 0.0;
  double top_p = 1.0;
  int max_response_tokens = 1024;

  // Stochastic preset used when aggregating repeated runs.
  static SamplingConfig repetition() { return {0.6, 0.9, 1024}; }

  void validate() const {
    if (!(temperature >= 0.0)) throw ConfigError("sampling: temperature must be >= 0");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("sampling: top_p must be in (0, 1]");
    if (max_response_tokens <= 0) throw ConfigError("sampling: max_response_tokens must be > 0");
  }
  bool operator==(const SamplingConfig&) const = default;
};

// Budget heuristic: about 1.3 tokens per whitespace-separated word plus a
// small per-message framing overhead. The backend's own overflow signal is
// authoritative.
inline std::size_t count_tokens_estimate(std::span<const ChatMessage> history) {
  std::size_t total = 0;
  for (const auto& m : history) {
    std::size_t words = 0;
    bool in_word = false;
    for (char c : m.content) {
      bool space = text::is_space(c);
      if (!space && !in_word) ++words;
      in_word = !space;
    }
    total += 4 + static_cast<std::size_t>(std::ceil(1.3 * static_cast<double>(words)));
  }
  return total;
}

// Chat model interface. complete() checks the history precondition and
// never modifies the caller's history.
class ChatModel {
 public:
  virtual ~ChatModel() = default;

  ChatMessage complete(std::span<const ChatMessage> history, const SamplingConfig& sampling) {
    std::size_t systems = 0;
    for (const auto& m : history) systems += m.role == Role::System ? 1 : 0;
    if (history.empty() || history.front().role != Role::System || systems != 1)
      throw PreconditionError("chat history must start with exactly one system message");
    ++calls_;
    return do_complete(history, sampling);
  }

  std::size_t calls() const { return calls_; }

 protected:
  virtual ChatMessage do_complete(std::span<const ChatMessage> history,
                                  const SamplingConfig& sampling) = 0;

 private:
  std::atomic<std::size_t> calls_{0};
};

// A scripted turn with this exact content makes the replay backend raise a
// context-overflow error instead of answering.
inline constexpr std::string_view kReplayOverflowTurn = "@@CONTEXT_LENGTH_EXCEEDED@@";

// Deterministic backend answering from a fixed script, one entry per call.
class ReplayChatModel final : public ChatModel {
 public:
  explicit ReplayChatModel(std::vector<std::string> script) : script_(std::move(script)) {}

  std::size_t remaining() const { return script_.size() - cursor_; }
  bool exhausted() const { return cursor_ == script_.size(); }
  std::size_t cursor() const { return cursor_; }

 protected:
  ChatMessage do_complete(std::span<const ChatMessage>, const SamplingConfig&) override {
    if (cursor_ >= script_.size())
      throw ScriptExhaustedError("replay script exhausted after " + std::to_string(script_.size()) +
                                 " turns");
    const auto& turn = script_[cursor_++];
    if (turn == kReplayOverflowTurn)
      throw ContextOverflowError("replay: scripted context length exceeded");
    return {Role::Assistant, turn};
  }

 private:
  std::vector<std::string> script_;
  std::size_t cursor_ = 0;
};

// `*.replay.json`: a JSON array of assistant strings for one agent run, or
// an array of such arrays for repeated runs.
inline std::vector<std::vector<std::string>> parse_replay_scripts(std::string_view content,
                                                                  const std::string& what) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(what + ": invalid JSON: " + e.what());
  }
  if (!doc.is_array()) throw FormatError(what + ": expected an array of strings");
  auto as_script = [&](const nlohmann::json& arr, const std::string& where) {
    std::vector<std::string> script;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string())
        throw FormatError(where + "[" + std::to_string(i) + "]: expected string");
      script.push_back(arr[i].get<std::string>());
    }
    return script;
  };
  std::vector<std::vector<std::string>> runs;
  if (!doc.empty() && doc.front().is_array()) {
    for (std::size_t r = 0; r < doc.size(); ++r) {
      if (!doc[r].is_array())
        throw FormatError(what + "[" + std::to_string(r) + "]: expected array of strings");
      runs.push_back(as_script(doc[r], what + "[" + std::to_string(r) + "]"));
    }
  } else {
    runs.push_back(as_script(doc, what));
  }
  return runs;
}

inline std::vector<std::vector<std::string>> load_replay_scripts(const std::filesystem::path& file) {
  return parse_replay_scripts(text::read_file(file), file.string());
}

inline nlohmann::ordered_json message_to_json(const ChatMessage& m) {
  nlohmann::ordered_json j;
  j["role"] = std::string(role_name(m.role));
  j["content"] = m.content;
  return j;
}

}  // namespace flexloc
