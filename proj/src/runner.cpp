#include "madsim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "madsim/assets.hpp"
#include "madsim/engine.hpp"
#include "madsim/errors.hpp"
#include "madsim/rng.hpp"
#include "madsim/serialize.hpp"

namespace madsim {

namespace {

// Salt separating the engine's mt19937_64 stream from the session seed.
constexpr std::uint64_t kEngineStreamSalt = 0x1dea;

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

void partition_into(BatchResult& result, DebateRecord record) {
  switch (record.outcome.status) {
    case RunStatus::ConvergedByConcession:
    case RunStatus::ConvergedByModerator:
      result.valid.push_back(std::move(record));
      break;
    case RunStatus::MaxRoundsExceeded:
      result.capped.push_back(std::move(record));
      break;
    case RunStatus::Failed:
      result.failed.push_back(std::move(record));
      break;
  }
}

// Runs the given indices and appends each record to the log in index order,
// regardless of which worker finishes first.
std::vector<DebateRecord> execute_runs(const BatchConfig& cfg, Backend& backend,
                                       const std::vector<Topic>& pool,
                                       const std::vector<std::uint64_t>& indices,
                                       std::size_t already_done, std::size_t total,
                                       const ProgressFn& progress) {
  const std::size_t n = indices.size();
  std::vector<DebateRecord> results(n);
  if (n == 0) return results;

  std::ofstream out;
  if (!cfg.out_path.empty()) {
    out.open(cfg.out_path, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open run log '" + cfg.out_path + "' for appending");
  }

  std::size_t workers = cfg.workers > 0 ? static_cast<std::size_t>(cfg.workers)
                                        : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, n);

  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> abort{false};
  std::mutex mu;
  std::condition_variable cv;
  std::vector<char> ready(n, 0);
  std::exception_ptr first_error;

  auto worker = [&] {
    for (;;) {
      if (abort.load(std::memory_order_relaxed)) return;
      const std::size_t slot = cursor.fetch_add(1);
      if (slot >= n) return;
      try {
        DebateRecord record = run_one(cfg, backend, pool, indices[slot]);
        {
          std::lock_guard lock(mu);
          results[slot] = std::move(record);
          ready[slot] = 1;
        }
        cv.notify_all();
      } catch (...) {
        {
          std::lock_guard lock(mu);
          if (!first_error) first_error = std::current_exception();
        }
        abort.store(true);
        cv.notify_all();
        return;
      }
    }
  };

  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) threads.emplace_back(worker);

    std::unique_lock lock(mu);
    std::size_t next = 0;
    while (next < n) {
      cv.wait(lock, [&] { return ready[next] || abort.load(); });
      if (!ready[next]) break;
      if (out.is_open()) {
        out << encode_record(results[next]) << '\n';
        if (!out) {
          if (!first_error)
            first_error = std::make_exception_ptr(
                IoError("write to run log '" + cfg.out_path + "' failed"));
          abort.store(true);
          break;
        }
      }
      ++next;
      if (progress) progress(already_done + next, total);
    }
    if (next < n) abort.store(true);
  }

  if (first_error) std::rethrow_exception(first_error);
  if (out.is_open()) {
    out.flush();
    if (!out) throw IoError("write to run log '" + cfg.out_path + "' failed");
  }
  return results;
}

}  // namespace

std::vector<Topic> parse_topics(std::string_view content) {
  std::vector<Topic> topics;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= content.size()) {
    const std::size_t stop = content.find('\n', start);
    std::string_view line = content.substr(
        start, stop == std::string_view::npos ? content.size() - start : stop - start);
    start = stop == std::string_view::npos ? content.size() + 1 : stop + 1;
    ++lineno;
    line = trim_view(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t sep = line.find('|');
    if (sep == std::string_view::npos)
      throw IoError("topic line " + std::to_string(lineno) +
                    " lacks a 'Domain|Proposition' separator");
    const std::string_view domain = trim_view(line.substr(0, sep));
    const std::string_view proposition = trim_view(line.substr(sep + 1));
    if (domain.empty() || proposition.empty())
      throw IoError("topic line " + std::to_string(lineno) + " has an empty field");
    char id[16];
    std::snprintf(id, sizeof(id), "t%02zu", topics.size());
    topics.push_back({id, std::string(domain), std::string(proposition)});
  }
  return topics;
}

std::vector<Topic> load_topics(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open topic file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::vector<Topic> topics = parse_topics(buf.str());
  if (topics.empty()) throw IoError("topic file '" + path + "' has no topics");
  return topics;
}

const std::vector<Topic>& bundled_topics() {
  static const std::vector<Topic> topics = parse_topics(assets::topics_file());
  return topics;
}

DebateRecord run_one(const BatchConfig& cfg, Backend& backend,
                     const std::vector<Topic>& pool, std::uint64_t index) {
  if (pool.empty()) throw std::invalid_argument("topic pool is empty");
  const std::uint64_t run_seed = derive_seed(cfg.seed, index);
  std::mt19937_64 rng(derive_seed(run_seed, kEngineStreamSalt));
  const Topic& topic = pool[bounded(rng, pool.size())];
  const auto session = backend.open_session(run_seed, cfg.toxicity);

  DebateRecord record;
  try {
    const auto agents = generate_agents(*session, topic, rng, cfg.toxicity,
                                        cfg.persuadability, cfg.generation);
    record = run_debate(*session, topic, agents, rng, cfg.max_arguments, cfg.generation);
  } catch (const std::exception& e) {
    // Setup failures (persona parsing, backend errors before the debate)
    // still produce a record so the run index is accounted for.
    record = DebateRecord{};
    record.topic = topic;
    record.backend_tag = std::string(session->backend_tag());
    record.outcome = {RunStatus::Failed, std::nullopt,
                      std::string("setup failed: ") + e.what()};
  }
  record.run_id = make_run_id(cfg.seed, index);
  record.master_seed = cfg.seed;
  record.run_index = index;
  return record;
}

BatchResult run_batch(const BatchConfig& cfg, Backend& backend,
                      const std::vector<Topic>& pool, ProgressFn progress) {
  validate_batch_config(cfg);
  if (pool.empty()) throw ConfigError("topic pool is empty");
  if (!cfg.out_path.empty()) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(cfg.out_path, ec);
    if (!ec && size > 0)
      throw ConfigError("run log '" + cfg.out_path +
                        "' already has content; resume it or pick another path");
  }

  std::vector<std::uint64_t> indices(cfg.iterations);
  for (std::uint64_t i = 0; i < cfg.iterations; ++i) indices[i] = i;
  auto records = execute_runs(cfg, backend, pool, indices, 0, cfg.iterations, progress);

  BatchResult result;
  for (auto& record : records) partition_into(result, std::move(record));
  return result;
}

BatchResult resume_batch(const BatchConfig& cfg, Backend& backend,
                         const std::vector<Topic>& pool, ProgressFn progress) {
  validate_batch_config(cfg);
  if (pool.empty()) throw ConfigError("topic pool is empty");
  if (cfg.out_path.empty())
    throw ConfigError("resume needs an out path pointing at the partial run log");

  std::map<std::uint64_t, DebateRecord> existing;
  if (std::filesystem::exists(cfg.out_path)) {
    for (auto& record : read_run_log(cfg.out_path)) {
      if (record.master_seed != cfg.seed)
        throw ConfigError("run log '" + cfg.out_path + "' was produced with master seed " +
                          std::to_string(record.master_seed) + ", but the config says " +
                          std::to_string(cfg.seed));
      if (record.run_index >= cfg.iterations)
        throw ConfigError("run log '" + cfg.out_path + "' contains run index " +
                          std::to_string(record.run_index) +
                          " beyond the configured iterations");
      const auto index = record.run_index;
      if (!existing.emplace(index, std::move(record)).second)
        throw IoError("run log '" + cfg.out_path + "' repeats run index " +
                      std::to_string(index));
    }
  }

  std::vector<std::uint64_t> missing;
  for (std::uint64_t i = 0; i < cfg.iterations; ++i)
    if (!existing.contains(i)) missing.push_back(i);

  auto fresh =
      execute_runs(cfg, backend, pool, missing, existing.size(), cfg.iterations, progress);

  BatchResult result;
  result.resumed = existing.size();
  std::size_t fresh_at = 0;
  for (std::uint64_t i = 0; i < cfg.iterations; ++i) {
    const auto it = existing.find(i);
    if (it != existing.end()) partition_into(result, std::move(it->second));
    else partition_into(result, std::move(fresh[fresh_at++]));
  }
  return result;
}

std::vector<DebateRecord> read_run_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open run log: " + path);
  std::vector<DebateRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      records.push_back(decode_record(line));
    } catch (const IoError& e) {
      throw IoError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace madsim
