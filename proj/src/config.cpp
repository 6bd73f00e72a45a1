#include "madsim/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "madsim/errors.hpp"
#include "madsim/serialize.hpp"

namespace madsim {

using nlohmann::json;

std::vector<std::string> config_violations(const BatchConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.iterations < 1) out.push_back("iterations must be >= 1");
  if (cfg.max_arguments < 2) out.push_back("max_arguments must be >= 2");
  if (cfg.n_agents != 2) out.push_back("n_agents must be 2 (1-on-1 debates only)");
  if (!(cfg.persuadability >= 0.0 && cfg.persuadability <= 1.0))
    out.push_back("persuadability outside [0,1]");
  if (cfg.backend != "synthetic" && cfg.backend != "http")
    out.push_back("backend must be 'synthetic' or 'http'");
  if (cfg.backend == "http" && cfg.base_url.empty())
    out.push_back("http backend requires base_url");
  if (cfg.workers < 0) out.push_back("workers must be >= 0");
  if (cfg.generation.temperature < 0.0) out.push_back("temperature must be >= 0");
  if (cfg.generation.max_tokens < 1) out.push_back("max_tokens must be >= 1");
  if (cfg.generation.timeout_ms < 1) out.push_back("timeout_ms must be >= 1");
  if (cfg.generation.max_attempts < 1) out.push_back("max_attempts must be >= 1");
  if (cfg.generation.backoff_ms < 0) out.push_back("backoff_ms must be >= 0");
  for (int i = 0; i < 4; ++i) {
    const auto level = static_cast<ToxicityLevel>(i);
    const auto& lm = cfg.synthetic.length_for(level);
    if (lm.mean < 2.0)
      out.push_back("synthetic length mean for '" + to_string(level) + "' must be >= 2");
    if (!(lm.variance > 0.0))
      out.push_back("synthetic length variance for '" + to_string(level) +
                    "' must be positive");
    const double r = cfg.synthetic.refusal_for(level);
    if (!(r >= 0.0 && r <= 1.0))
      out.push_back("synthetic refusal rate for '" + to_string(level) + "' outside [0,1]");
  }
  return out;
}

const BatchConfig& validate_batch_config(const BatchConfig& cfg) {
  const auto violations = config_violations(cfg);
  if (!violations.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw ConfigError(msg);
  }
  return cfg;
}

namespace {

void apply_generation(GenerationParams& gen, const json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "model") gen.model = value.get<std::string>();
    else if (key == "temperature") gen.temperature = value.get<double>();
    else if (key == "max_tokens") gen.max_tokens = value.get<int>();
    else if (key == "timeout_ms") gen.timeout_ms = value.get<int>();
    else if (key == "max_attempts") gen.max_attempts = value.get<int>();
    else if (key == "backoff_ms") gen.backoff_ms = value.get<int>();
    else throw ConfigError("unknown generation key: '" + key + "'");
  }
}

void apply_level_map(std::array<LengthModel, 4>& lengths, std::array<double, 4>& rates,
                     const json& j) {
  for (const auto& [key, value] : j.items()) {
    const ToxicityLevel level = parse_toxicity_level(key);
    const int idx = static_cast<int>(level);
    for (const auto& [field, fv] : value.items()) {
      if (field == "mean") lengths[idx].mean = fv.get<double>();
      else if (field == "variance") lengths[idx].variance = fv.get<double>();
      else if (field == "refusal_rate") rates[idx] = fv.get<double>();
      else throw ConfigError("unknown synthetic key: '" + field + "'");
    }
  }
}

}  // namespace

void apply_config_json(BatchConfig& cfg, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "iterations") cfg.iterations = value.get<std::uint64_t>();
      else if (key == "toxicity") cfg.toxicity = parse_toxicity_level(value.get<std::string>());
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "max_arguments") cfg.max_arguments = value.get<int>();
      else if (key == "n_agents") cfg.n_agents = value.get<int>();
      else if (key == "persuadability") cfg.persuadability = value.get<double>();
      else if (key == "backend") cfg.backend = value.get<std::string>();
      else if (key == "base_url") cfg.base_url = value.get<std::string>();
      else if (key == "generation") apply_generation(cfg.generation, value);
      else if (key == "synthetic") apply_level_map(cfg.synthetic.length, cfg.synthetic.refusal_rate, value);
      else if (key == "out") cfg.out_path = value.get<std::string>();
      else if (key == "topics") cfg.topics_path = value.get<std::string>();
      else if (key == "workers") cfg.workers = value.get<int>();
      else throw ConfigError("unknown config key: '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
}

BatchConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  BatchConfig cfg;
  apply_config_json(cfg, buf.str());
  return cfg;
}

std::string effective_config_json(const BatchConfig& cfg) {
  json synthetic;
  for (int i = 0; i < 4; ++i) {
    const auto level = static_cast<ToxicityLevel>(i);
    synthetic[to_string(level)] = {{"mean", cfg.synthetic.length[i].mean},
                                   {"variance", cfg.synthetic.length[i].variance},
                                   {"refusal_rate", cfg.synthetic.refusal_rate[i]}};
  }
  json j{{"iterations", cfg.iterations},
         {"toxicity", to_string(cfg.toxicity)},
         {"seed", cfg.seed},
         {"max_arguments", cfg.max_arguments},
         {"n_agents", cfg.n_agents},
         {"persuadability", cfg.persuadability},
         {"backend", cfg.backend},
         {"base_url", cfg.base_url},
         {"generation", {{"model", cfg.generation.model},
                         {"temperature", cfg.generation.temperature},
                         {"max_tokens", cfg.generation.max_tokens},
                         {"timeout_ms", cfg.generation.timeout_ms},
                         {"max_attempts", cfg.generation.max_attempts},
                         {"backoff_ms", cfg.generation.backoff_ms}}},
         {"synthetic", std::move(synthetic)},
         {"out", cfg.out_path},
         {"topics", cfg.topics_path},
         {"workers", cfg.workers}};
  return j.dump(2);
}

}  // namespace madsim
