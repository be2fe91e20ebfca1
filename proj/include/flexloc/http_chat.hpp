#pragma once

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "flexloc/error.hpp"
#include "flexloc/llm_gateway.hpp"
#include "flexloc/text.hpp"

namespace flexloc {

struct HttpGatewaySettings {
  std::string url;  // full chat-completions endpoint, e.g. http://host:8000/v1/chat/completions
  std::string model;
  std::string api_key;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  int timeout_seconds = 300;
  std::size_t context_limit = 0;  // 0 disables the local pre-check

  // FLEXLOC_LLM_URL, FLEXLOC_LLM_MODEL and FLEXLOC_LLM_KEY fill any field
  // still empty.
  void apply_environment() {
    auto env = [](const char* name) -> std::string {
      const char* v = std::getenv(name);
      return v ? v : "";
    };
    if (url.empty()) url = env("FLEXLOC_LLM_URL");
    if (model.empty()) model = env("FLEXLOC_LLM_MODEL");
    if (api_key.empty()) api_key = env("FLEXLOC_LLM_KEY");
  }
};

namespace detail {

struct EndpointParts {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline EndpointParts split_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("gateway url needs a scheme: " + url);
  auto slash = url.find('/', scheme_end + 3);
  EndpointParts p;
  p.origin = url.substr(0, slash);
  p.path = slash == std::string::npos ? "/v1/chat/completions" : url.substr(slash);
  return p;
}

inline bool looks_like_context_overflow(int status, const std::string& body) {
  if (status == 413) return true;
  auto b = text::to_lower(body);
  return b.find("context_length_exceeded") != std::string::npos ||
         b.find("maximum context length") != std::string::npos ||
         b.find("context length") != std::string::npos ||
         b.find("too many tokens") != std::string::npos;
}

}  // namespace detail

// Chat-completions client. Transient failures (connection errors, 429,
// 5xx) are retried with exponential backoff; an overflow reply is reported
// as ContextOverflowError without retrying.
class HttpChatModel final : public ChatModel {
 public:
  explicit HttpChatModel(HttpGatewaySettings settings) : settings_(std::move(settings)) {
    if (settings_.url.empty()) throw ConfigError("gateway url not configured (set FLEXLOC_LLM_URL)");
    if (settings_.max_attempts < 1) throw ConfigError("gateway max_attempts must be >= 1");
    endpoint_ = detail::split_endpoint(settings_.url);
  }

  const HttpGatewaySettings& settings() const { return settings_; }

 protected:
  ChatMessage do_complete(std::span<const ChatMessage> history,
                          const SamplingConfig& sampling) override {
    if (settings_.context_limit > 0 &&
        count_tokens_estimate(history) + static_cast<std::size_t>(sampling.max_response_tokens) >
            settings_.context_limit)
      throw ContextOverflowError("estimated prompt exceeds the configured context limit");

    nlohmann::ordered_json body;
    if (!settings_.model.empty()) body["model"] = settings_.model;
    auto& msgs = body["messages"] = nlohmann::ordered_json::array();
    for (const auto& m : history) msgs.push_back(message_to_json(m));
    body["temperature"] = sampling.temperature;
    body["top_p"] = sampling.top_p;
    body["max_tokens"] = sampling.max_response_tokens;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!settings_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + settings_.api_key);

    std::string last_error;
    auto backoff = settings_.initial_backoff;
    for (int attempt = 1; attempt <= settings_.max_attempts; ++attempt) {
      httplib::Client cli(endpoint_.origin);
      cli.set_connection_timeout(settings_.timeout_seconds, 0);
      cli.set_read_timeout(settings_.timeout_seconds, 0);
      auto res = cli.Post(endpoint_.path, headers, payload, "application/json");
      if (!res) {
        last_error = "connection failed: " + httplib::to_string(res.error());
      } else if (res->status == 200) {
        return parse_reply(res->body);
      } else if (detail::looks_like_context_overflow(res->status, res->body)) {
        throw ContextOverflowError("backend reported context overflow: " + res->body);
      } else if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
      } else {
        throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body);
      }
      if (attempt < settings_.max_attempts) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
    }
    throw TransportError("chat request failed after " + std::to_string(settings_.max_attempts) +
                         " attempts: " + last_error);
  }

 private:
  static ChatMessage parse_reply(const std::string& body) {
    try {
      auto doc = nlohmann::json::parse(body);
      const auto& content = doc.at("choices").at(0).at("message").at("content");
      if (!content.is_string()) throw TransportError("reply content is not a string");
      return {Role::Assistant, content.get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("malformed chat reply: ") + e.what());
    }
  }

  HttpGatewaySettings settings_;
  detail::EndpointParts endpoint_;
};

}  // namespace flexloc
