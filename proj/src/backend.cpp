#include "llmdp/backend.hpp"

#include <algorithm>
#include <cstdlib>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace llmdp {

using nlohmann::json;

const std::string& ChatRequest::last_user_content() const {
  static const std::string kEmpty;
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == "user") return it->content;
  }
  return kEmpty;
}

size_t ChatRequest::total_chars() const {
  size_t n = 0;
  for (const auto& m : messages) n += m.content.size();
  return n;
}

void CallRecorder::record(std::string tag, ChatRequest request, ChatResponse response) {
  std::lock_guard<std::mutex> lock(mutex_);
  calls_.push_back({std::move(tag), std::move(request), std::move(response)});
}

long CallRecorder::prompt_tokens(std::string_view tag) const {
  std::lock_guard<std::mutex> lock(mutex_);
  long n = 0;
  for (const auto& c : calls_) {
    if (tag.empty() || c.tag == tag) n += c.response.prompt_tokens;
  }
  return n;
}

long CallRecorder::completion_tokens(std::string_view tag) const {
  std::lock_guard<std::mutex> lock(mutex_);
  long n = 0;
  for (const auto& c : calls_) {
    if (tag.empty() || c.tag == tag) n += c.response.completion_tokens;
  }
  return n;
}

ChatResponse ChatBackend::complete(const ChatRequest& request) {
  if (request.messages.empty()) {
    raise(ErrorKind::MalformedExpression, "chat request has no messages");
  }
  ChatResponse response = do_complete(request);
  prompt_tokens_ += response.prompt_tokens;
  completion_tokens_ += response.completion_tokens;
  return response;
}

// ---------------------------------------------------------------------------
// ScriptedBackend

bool matches_wildcard(std::string_view pattern, std::string_view text) {
  // '*' matches any run of characters; segments must appear in order, the
  // first and last segment anchored unless the pattern starts/ends with '*'.
  std::vector<std::string_view> segments;
  size_t start = 0;
  while (start <= pattern.size()) {
    size_t star = pattern.find('*', start);
    if (star == std::string_view::npos) {
      segments.push_back(pattern.substr(start));
      break;
    }
    segments.push_back(pattern.substr(start, star - start));
    start = star + 1;
  }
  if (segments.size() == 1) return pattern == text;

  size_t pos = 0;
  for (size_t i = 0; i < segments.size(); ++i) {
    std::string_view seg = segments[i];
    if (seg.empty()) continue;
    if (i == 0) {
      if (text.substr(0, seg.size()) != seg) return false;
      pos = seg.size();
    } else if (i + 1 == segments.size()) {
      if (text.size() < pos + seg.size()) return false;
      return text.substr(text.size() - seg.size()) == seg;
    } else {
      size_t found = text.find(seg, pos);
      if (found == std::string_view::npos) return false;
      pos = found + seg.size();
    }
  }
  return true;
}

void ScriptedBackend::add_fixture(Match kind, std::string pattern, std::string reply) {
  fixtures_.push_back({kind, std::move(pattern), std::move(reply)});
}

ChatResponse ScriptedBackend::do_complete(const ChatRequest& request) {
  const std::string& prompt = request.last_user_content();
  const Fixture* hit = nullptr;
  for (Match kind : {Match::Exact, Match::Prefix, Match::Wildcard}) {
    for (const auto& f : fixtures_) {
      if (f.kind != kind) continue;
      bool ok = false;
      switch (kind) {
        case Match::Exact: ok = f.pattern == prompt; break;
        case Match::Prefix: ok = prompt.compare(0, f.pattern.size(), f.pattern) == 0; break;
        case Match::Wildcard: ok = matches_wildcard(f.pattern, prompt); break;
      }
      if (ok) {
        hit = &f;
        break;
      }
    }
    if (hit) break;
  }
  if (!hit) {
    std::string head = prompt.substr(0, 160);
    raise(ErrorKind::FixtureMiss, "no fixture matches user message: \"" + head + "\"");
  }
  ChatResponse response;
  response.content = hit->reply;
  response.prompt_tokens = static_cast<long>((request.total_chars() + 3) / 4);
  response.completion_tokens = static_cast<long>((hit->reply.size() + 3) / 4);
  return response;
}

// ---------------------------------------------------------------------------
// HttpBackend

struct HttpBackend::Impl {
  Config config;
  std::unique_ptr<httplib::Client> client;
  std::counting_semaphore<64> in_flight;

  explicit Impl(Config cfg)
      : config(std::move(cfg)), in_flight(std::max(1, config.max_in_flight)) {
    client = std::make_unique<httplib::Client>(config.base_url);
    client->set_connection_timeout(config.timeout.count(), 0);
    client->set_read_timeout(config.timeout.count(), 0);
    if (!config.api_key.empty()) {
      client->set_default_headers({{"Authorization", "Bearer " + config.api_key}});
    }
  }
};

HttpBackend::HttpBackend(Config config) : impl_(std::make_unique<Impl>(std::move(config))) {}
HttpBackend::~HttpBackend() = default;

HttpBackend::Config HttpBackend::config_from_env() {
  Config config;
  if (const char* url = std::getenv("LLMDP_BASE_URL")) config.base_url = url;
  if (const char* key = std::getenv("LLMDP_API_KEY")) config.api_key = key;
  if (const char* model = std::getenv("LLMDP_MODEL")) config.model = model;
  return config;
}

std::string HttpBackend::describe() const {
  return "http backend url=" + impl_->config.base_url + " model=" + impl_->config.model +
         " api_key=" + (impl_->config.api_key.empty() ? "<unset>" : "<redacted>");
}

ChatResponse HttpBackend::do_complete(const ChatRequest& request) {
  json body;
  body["model"] = impl_->config.model;
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  body["messages"] = json::array();
  for (const auto& m : request.messages) {
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  const std::string payload = body.dump();

  impl_->in_flight.acquire();
  struct Release {
    std::counting_semaphore<64>* sem;
    ~Release() { sem->release(); }
  } release{&impl_->in_flight};

  std::string last_error;
  for (int attempt = 0; attempt <= impl_->config.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(impl_->config.base_backoff * (1 << (attempt - 1)));
    }
    httplib::Result res =
        impl_->client->Post(impl_->config.path, payload, "application/json");
    if (!res) {
      last_error = "transport error " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      raise(ErrorKind::BackendUnavailable,
            "status " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty()) {
      last_error = "malformed reply body";
      continue;
    }
    ChatResponse response;
    response.content = reply["choices"][0]["message"]["content"].get<std::string>();
    if (reply.contains("usage")) {
      response.prompt_tokens = reply["usage"].value("prompt_tokens", 0);
      response.completion_tokens = reply["usage"].value("completion_tokens", 0);
    }
    return response;
  }
  raise(ErrorKind::BackendUnavailable,
        "giving up after " + std::to_string(impl_->config.max_retries + 1) + " attempts (" +
            last_error + ")");
}

}  // namespace llmdp
