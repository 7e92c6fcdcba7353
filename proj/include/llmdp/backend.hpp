#pragma once

// Chat-completion abstraction with two implementations: a deterministic
// scripted backend for hermetic tests, and an HTTP client for any
// chat-completions-compatible service. Both keep cumulative token counters
// that are exact sums of per-call usage.

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "llmdp/error.hpp"

namespace llmdp {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 512;

  const std::string& last_user_content() const;
  size_t total_chars() const;
};

struct ChatResponse {
  std::string content;
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  ChatResponse complete(const ChatRequest& request);

  long total_prompt_tokens() const { return prompt_tokens_.load(); }
  long total_completion_tokens() const { return completion_tokens_.load(); }
  long total_tokens() const { return total_prompt_tokens() + total_completion_tokens(); }

 protected:
  virtual ChatResponse do_complete(const ChatRequest& request) = 0;

 private:
  std::atomic<long> prompt_tokens_{0};
  std::atomic<long> completion_tokens_{0};
};

// Replies come from a fixture table matched against the last user message:
// exact matches first, then prefixes, then '*' wildcards. An unmatched
// prompt throws FixtureMiss so tests fail loudly. Token counts are estimated
// as ceil(chars / 4) per side, labeled as an estimate in reports.
class ScriptedBackend : public ChatBackend {
 public:
  enum class Match { Exact, Prefix, Wildcard };

  void add_fixture(Match kind, std::string pattern, std::string reply);
  void add_exact(std::string pattern, std::string reply) {
    add_fixture(Match::Exact, std::move(pattern), std::move(reply));
  }
  void add_prefix(std::string pattern, std::string reply) {
    add_fixture(Match::Prefix, std::move(pattern), std::move(reply));
  }
  void add_wildcard(std::string pattern, std::string reply) {
    add_fixture(Match::Wildcard, std::move(pattern), std::move(reply));
  }
  size_t fixture_count() const { return fixtures_.size(); }

 protected:
  ChatResponse do_complete(const ChatRequest& request) override;

 private:
  struct Fixture {
    Match kind;
    std::string pattern;
    std::string reply;
  };
  std::vector<Fixture> fixtures_;
};

// Standard chat-completions JSON over HTTP(S); usage counts are taken from
// the service's reply. Transient failures are retried with exponential
// backoff. The credential is read from the environment and never logged.
class HttpBackend : public ChatBackend {
 public:
  struct Config {
    std::string base_url;                 // e.g. https://api.example.com
    std::string path = "/v1/chat/completions";
    std::string model = "gpt-3.5-turbo-0613";
    std::string api_key;
    int max_retries = 3;
    std::chrono::milliseconds base_backoff{1000};
    int max_in_flight = 4;
    std::chrono::seconds timeout{60};
  };

  explicit HttpBackend(Config config);
  ~HttpBackend() override;

  // Reads LLMDP_BASE_URL / LLMDP_API_KEY / LLMDP_MODEL.
  static Config config_from_env();

  // Redacted summary, safe to log.
  std::string describe() const;

 protected:
  ChatResponse do_complete(const ChatRequest& request) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

bool matches_wildcard(std::string_view pattern, std::string_view text);

struct BackendCallRecord {
  std::string tag;  // "goal" | "sampler"
  ChatRequest request;
  ChatResponse response;
};

// Verbatim prompt/response log feeding per-episode token accounting.
class CallRecorder {
 public:
  void record(std::string tag, ChatRequest request, ChatResponse response);
  const std::vector<BackendCallRecord>& calls() const { return calls_; }
  long prompt_tokens(std::string_view tag = {}) const;
  long completion_tokens(std::string_view tag = {}) const;
  long total_tokens() const { return prompt_tokens() + completion_tokens(); }

 private:
  std::vector<BackendCallRecord> calls_;
  mutable std::mutex mutex_;
};

}  // namespace llmdp
