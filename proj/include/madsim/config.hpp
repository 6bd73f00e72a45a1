#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "madsim/types.hpp"

namespace madsim {

struct GenerationParams {
  std::string model = "default";
  double temperature = 0.7;
  int max_tokens = 1024;
  int timeout_ms = 60000;
  int max_attempts = 3;   // transport/rate-limit attempts per request
  int backoff_ms = 250;   // base of the exponential backoff
};

struct LengthModel {
  double mean = 0.0;
  double variance = 0.0;
};

// Calibration of the deterministic scripted backend. Length models follow the
// observed per-condition convergence statistics; heavy reuses the moderate
// lengths since heavy sessions exist mainly to exercise refusal handling.
struct SyntheticParams {
  std::array<LengthModel, 4> length{{
      {9.40, 7.84},    // no toxicity
      {11.30, 8.27},   // mild
      {11.75, 8.94},   // moderate
      {11.75, 8.94},   // heavy
  }};
  std::array<double, 4> refusal_rate{{0.0, 0.0, 0.0, 0.5}};

  const LengthModel& length_for(ToxicityLevel level) const {
    return length[static_cast<int>(level)];
  }
  double refusal_for(ToxicityLevel level) const {
    return refusal_rate[static_cast<int>(level)];
  }
};

struct BatchConfig {
  std::uint64_t iterations = 1;
  ToxicityLevel toxicity = ToxicityLevel::No;
  std::uint64_t seed = 0;
  int max_arguments = 50;
  int n_agents = 2;
  double persuadability = 0.5;
  std::string backend = "synthetic";  // "synthetic" or "http"
  std::string base_url;               // http backend only
  GenerationParams generation;
  SyntheticParams synthetic;
  std::string out_path;
  std::string topics_path;  // empty selects the bundled pool
  int workers = 0;          // 0 = hardware concurrency
};

// Environment variable holding the API key for the http backend. The key is
// read at request time and never stored or logged.
inline constexpr const char* kApiKeyEnvVar = "MADSIM_API_KEY";

// All violations in one pass, empty when the config is usable.
std::vector<std::string> config_violations(const BatchConfig& cfg);

// Throws ConfigError listing every violation; returns its argument otherwise.
const BatchConfig& validate_batch_config(const BatchConfig& cfg);

// Reads a JSON config file; unknown keys are rejected so typos surface early.
BatchConfig load_config_file(const std::string& path);

// Applies the JSON text onto `cfg`; exposed separately for tests.
void apply_config_json(BatchConfig& cfg, const std::string& json_text);

// Echo of the effective config (for logs and debugging); carries no secrets.
std::string effective_config_json(const BatchConfig& cfg);

}  // namespace madsim
