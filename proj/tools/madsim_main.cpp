#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "madsim/config.hpp"
#include "madsim/errors.hpp"
#include "madsim/http_backend.hpp"
#include "madsim/report.hpp"
#include "madsim/runner.hpp"
#include "madsim/serialize.hpp"
#include "madsim/synthetic.hpp"

namespace {

using namespace madsim;

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::vector<Topic> topic_pool(const std::string& topics_path) {
  return topics_path.empty() ? bundled_topics() : load_topics(topics_path);
}

int run_simulate(const BatchConfig& cfg) {
  validate_batch_config(cfg);
  if (cfg.out_path.empty())
    throw ConfigError("simulate needs an output path (--out or config key 'out')");

  const std::vector<Topic> pool = topic_pool(cfg.topics_path);

  std::unique_ptr<Backend> backend;
  if (cfg.backend == "synthetic") {
    backend = std::make_unique<SyntheticBackend>(cfg.synthetic);
  } else {
    backend = std::make_unique<HttpBackend>(
        HttpBackendOptions{cfg.base_url, cfg.generation.model});
  }

  std::cerr << "effective config:\n" << effective_config_json(cfg) << "\n";

  const std::uint64_t total = cfg.iterations;
  const std::uint64_t step = total < 20 ? 1 : total / 20;
  auto progress = [&](std::size_t done, std::size_t all) {
    if (done == all || done % step == 0)
      std::cerr << "completed " << done << "/" << all << " runs\n";
  };

  std::error_code ec;
  const auto existing_size = std::filesystem::file_size(cfg.out_path, ec);
  const bool resume = !ec && existing_size > 0;

  BatchResult result;
  if (resume) {
    result = resume_batch(cfg, *backend, pool, progress);
    if (result.resumed == cfg.iterations)
      std::cerr << "nothing to do: run log already complete\n";
    else
      std::cerr << "resumed " << result.resumed << " finished runs\n";
  } else {
    result = run_batch(cfg, *backend, pool, progress);
  }

  std::cout << "{\"iterations\": " << cfg.iterations << ", \"valid\": " << result.valid.size()
            << ", \"failed\": " << result.failed.size()
            << ", \"capped\": " << result.capped.size()
            << ", \"resumed\": " << result.resumed << ", \"out\": \"" << cfg.out_path
            << "\"}\n";
  return 0;
}

int run_analyze(const std::vector<std::string>& logs, const std::string& out_dir) {
  std::vector<report::LogSummary> summaries;
  summaries.reserve(logs.size());
  for (const auto& path : logs) summaries.push_back(report::summarize_log(path));
  const report::Analysis analysis = report::analyze(summaries);
  report::write_analysis_files(analysis, out_dir);
  std::cout << report::summary_table(analysis);
  std::cerr << "wrote " << out_dir << "/summary.csv and " << analysis.histograms.size()
            << " histogram files\n";
  return 0;
}

int run_topics(const std::string& action, const std::string& domain,
               const std::string& format, const std::string& topics_path) {
  const std::vector<Topic> pool = topic_pool(topics_path);

  if (action == "list") {
    for (const auto& t : pool) {
      if (!domain.empty() && t.domain != domain) continue;
      if (format == "csv")
        std::cout << csv_escape(t.id) << ',' << csv_escape(t.domain) << ','
                  << csv_escape(t.proposition) << '\n';
      else
        std::cout << t.id << '\t' << t.domain << '\t' << t.proposition << '\n';
    }
    return 0;
  }

  std::map<std::string, std::size_t> counts;
  for (const auto& t : pool) ++counts[t.domain];
  if (!domain.empty()) {
    const auto it = counts.find(domain);
    if (it == counts.end()) throw ConfigError("unknown domain: '" + domain + "'");
    std::cout << it->second << '\n';
    return 0;
  }
  if (format == "csv") {
    std::cout << "domain,count\n";
    for (const auto& [name, count] : counts)
      std::cout << csv_escape(name) << ',' << count << '\n';
  } else {
    for (const auto& [name, count] : counts) std::cout << name << ' ' << count << '\n';
    std::cout << "total " << pool.size() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo simulator for 1-on-1 debates between language-model agents"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run or resume a batch of debates");
  std::string config_path;
  std::uint64_t iterations = 0;
  std::string toxicity;
  std::uint64_t seed = 0;
  int max_arguments = 0;
  double persuadability = 0.0;
  std::string backend_name;
  std::string base_url;
  std::string model;
  std::string out_path;
  std::string topics_path;
  int workers = 0;
  sim->add_option("--config", config_path, "JSON config file; flags override its values");
  sim->add_option("-n,--iterations", iterations, "Number of debates in the batch");
  sim->add_option("--toxicity", toxicity, "Treatment condition: no, mild, moderate, heavy");
  sim->add_option("--seed", seed, "Master seed for the batch");
  sim->add_option("--max-arguments", max_arguments, "Argument cap per debate");
  sim->add_option("--persuadability", persuadability, "Persuadability score in [0,1]");
  sim->add_option("--backend", backend_name, "Backend: synthetic or http");
  sim->add_option("--base-url", base_url, "Chat completion endpoint for the http backend");
  sim->add_option("--model", model, "Model name sent to the http backend");
  sim->add_option("--out", out_path, "Run log to write (JSON lines, appended in run order)");
  sim->add_option("--topics", topics_path, "Topic file overriding the bundled pool");
  sim->add_option("--workers", workers, "Worker threads; 0 = hardware concurrency");

  // analyze
  auto* ana = app.add_subcommand("analyze", "Cross-condition statistics from run logs");
  std::vector<std::string> log_paths;
  std::string out_dir = "analysis";
  ana->add_option("--log", log_paths, "Run log (repeat per condition; one must be control)")
      ->required()
      ->expected(-1);
  ana->add_option("--out-dir", out_dir, "Directory for summary.csv and histogram CSVs");

  // topics
  auto* top = app.add_subcommand("topics", "Inspect the debate topic pool");
  std::string action = "list";
  std::string domain;
  std::string format = "text";
  std::string topics_file;
  top->add_option("action", action, "'list' or 'count'")
      ->check(CLI::IsMember({"list", "count"}));
  top->add_option("--domain", domain, "Restrict to one domain");
  top->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "csv"}));
  top->add_option("--topics", topics_file, "Topic file overriding the bundled pool");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sim->parsed()) {
      BatchConfig cfg;
      if (!config_path.empty()) cfg = load_config_file(config_path);
      if (sim->count("--iterations")) cfg.iterations = iterations;
      if (sim->count("--toxicity")) {
        try {
          cfg.toxicity = parse_toxicity_level(toxicity);
        } catch (const IoError& e) {
          throw ConfigError(e.what());
        }
      }
      if (sim->count("--seed")) cfg.seed = seed;
      if (sim->count("--max-arguments")) cfg.max_arguments = max_arguments;
      if (sim->count("--persuadability")) cfg.persuadability = persuadability;
      if (sim->count("--backend")) cfg.backend = backend_name;
      if (sim->count("--base-url")) cfg.base_url = base_url;
      if (sim->count("--model")) cfg.generation.model = model;
      if (sim->count("--out")) cfg.out_path = out_path;
      if (sim->count("--topics")) cfg.topics_path = topics_path;
      if (sim->count("--workers")) cfg.workers = workers;
      return run_simulate(cfg);
    }
    if (ana->parsed()) return run_analyze(log_paths, out_dir);
    return run_topics(action, domain, format, topics_file);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
