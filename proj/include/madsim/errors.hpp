#pragma once

#include <stdexcept>
#include <string>

namespace madsim {

// Invalid batch configuration (bad ranges, unknown backend, missing files).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem failures: unreadable topic files, corrupt run logs, write errors.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// A model reply that could not be parsed into the expected structure.
class MalformedReply : public std::runtime_error {
 public:
  explicit MalformedReply(const std::string& what) : std::runtime_error(what) {}
};

// A model reply that declined to engage instead of answering.
class RefusalDetected : public std::runtime_error {
 public:
  explicit RefusalDetected(const std::string& what) : std::runtime_error(what) {}
};

enum class BackendErrorKind {
  Transport,    // connection failure or 5xx; retryable
  RateLimited,  // 429; retryable with backoff
  Refusal,      // provider-side content filter; terminal for the run
  Malformed,    // unusable response payload; terminal
};

class BackendError : public std::runtime_error {
 public:
  BackendError(BackendErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  BackendErrorKind kind() const { return kind_; }

 private:
  BackendErrorKind kind_;
};

inline bool is_retryable(BackendErrorKind kind) {
  return kind == BackendErrorKind::Transport || kind == BackendErrorKind::RateLimited;
}

}  // namespace madsim
