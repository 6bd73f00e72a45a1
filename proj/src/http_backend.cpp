#include "madsim/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "madsim/errors.hpp"

namespace madsim {

using nlohmann::json;

namespace http_detail {

SplitUrl split_base_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("base_url must start with http:// or https://: " + base_url);
  const auto path_start = base_url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.origin = base_url;
  } else {
    out.origin = base_url.substr(0, path_start);
    out.path_prefix = base_url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/')
      out.path_prefix.pop_back();
  }
  return out;
}

std::string build_chat_request(const std::string& model, std::string_view prompt,
                               const GenerationParams& params) {
  json body{{"model", model},
            {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
            {"temperature", params.temperature},
            {"max_tokens", params.max_tokens}};
  return body.dump();
}

std::string extract_chat_reply(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded())
    throw BackendError(BackendErrorKind::Malformed, "completion body is not valid JSON");
  if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
    throw BackendError(BackendErrorKind::Malformed, "completion body has no choices");
  const json& choice = j["choices"][0];
  if (choice.value("finish_reason", "") == "content_filter")
    throw BackendError(BackendErrorKind::Refusal,
                       "provider content filter blocked the completion");
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string())
    throw BackendError(BackendErrorKind::Malformed,
                       "completion choice has no message content");
  return choice["message"]["content"].get<std::string>();
}

}  // namespace http_detail

namespace {

class HttpSession final : public Session {
 public:
  HttpSession(const HttpBackendOptions& options, http_detail::SplitUrl url)
      : options_(options), url_(std::move(url)) {}

  std::string complete(std::string_view prompt, const GenerationParams& params) override {
    httplib::Client client(url_.origin);
    client.set_connection_timeout(std::chrono::milliseconds(params.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(params.timeout_ms));
    client.set_write_timeout(std::chrono::milliseconds(params.timeout_ms));

    httplib::Headers headers;
    if (const char* key = std::getenv(options_.api_key_env.c_str()); key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);

    const std::string body =
        http_detail::build_chat_request(options_.model, prompt, params);
    const std::string path = url_.path_prefix + "/chat/completions";

    std::string last_error = "no attempts made";
    BackendErrorKind last_kind = BackendErrorKind::Transport;
    for (int attempt = 1; attempt <= params.max_attempts; ++attempt) {
      if (attempt > 1) {
        const auto delay =
            std::chrono::milliseconds(params.backoff_ms) * (1 << (attempt - 2));
        std::this_thread::sleep_for(delay);
      }
      httplib::Result res = client.Post(path, headers, body, "application/json");
      if (!res) {
        last_kind = BackendErrorKind::Transport;
        last_error = "connection failed: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429) {
        last_kind = BackendErrorKind::RateLimited;
        last_error = "rate limited (429)";
        continue;
      }
      if (res->status >= 500) {
        last_kind = BackendErrorKind::Transport;
        last_error = "server error (" + std::to_string(res->status) + ")";
        continue;
      }
      if (res->status != 200)
        throw BackendError(BackendErrorKind::Malformed,
                           "unexpected status " + std::to_string(res->status));
      return http_detail::extract_chat_reply(res->body);
    }
    throw BackendError(last_kind, last_error + " after " +
                                      std::to_string(params.max_attempts) + " attempts");
  }

  std::string_view backend_tag() const override { return "http"; }

 private:
  HttpBackendOptions options_;
  http_detail::SplitUrl url_;
};

}  // namespace

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  http_detail::split_base_url(options_.base_url);  // fail fast on bad URLs
}

std::unique_ptr<Session> HttpBackend::open_session(std::uint64_t, ToxicityLevel) {
  return std::make_unique<HttpSession>(options_,
                                       http_detail::split_base_url(options_.base_url));
}

}  // namespace madsim
