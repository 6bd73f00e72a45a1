#pragma once

#include <memory>
#include <string>

#include "madsim/backend.hpp"

namespace madsim {

struct HttpBackendOptions {
  std::string base_url;            // e.g. http://host:port or http://host/v1
  std::string model = "default";
  std::string api_key_env = kApiKeyEnvVar;
};

// OpenAI-style chat completion client. Each session owns its own connection,
// so concurrent runs never share mutable state. Transport failures and 429s
// are retried with exponential backoff up to GenerationParams::max_attempts;
// other HTTP errors and unusable payloads fail fast, and a content_filter
// finish reason surfaces as a refusal.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  std::unique_ptr<Session> open_session(std::uint64_t run_seed,
                                        ToxicityLevel treatment) override;

  std::string_view tag() const override { return "http"; }

 private:
  HttpBackendOptions options_;
};

// Parsing/assembly helpers, exposed for tests.
namespace http_detail {

struct SplitUrl {
  std::string origin;       // scheme://host[:port]
  std::string path_prefix;  // "" or "/v1" style prefix, no trailing slash
};

SplitUrl split_base_url(const std::string& base_url);

std::string build_chat_request(const std::string& model, std::string_view prompt,
                               const GenerationParams& params);

// Extracts the assistant text from a chat completion body. Throws
// BackendError{Malformed} on unusable payloads, BackendError{Refusal} when
// finish_reason is "content_filter".
std::string extract_chat_reply(const std::string& body);

}  // namespace http_detail

}  // namespace madsim
