#pragma once

#include <functional>
#include <string>
#include <vector>

#include "madsim/backend.hpp"
#include "madsim/config.hpp"
#include "madsim/types.hpp"

namespace madsim {

struct BatchResult {
  std::vector<DebateRecord> valid;   // converged runs
  std::vector<DebateRecord> failed;  // refusals and unrecoverable errors
  std::vector<DebateRecord> capped;  // argument cap reached
  std::size_t resumed = 0;           // records taken from an existing log

  std::size_t total() const { return valid.size() + failed.size() + capped.size(); }
};

// Optional progress callback: (completed, total).
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

std::vector<Topic> parse_topics(std::string_view content);
std::vector<Topic> load_topics(const std::string& path);
const std::vector<Topic>& bundled_topics();

// Executes one run of a batch. Every run derives its own seed from
// (cfg.seed, index), so any subset can be reproduced in isolation.
DebateRecord run_one(const BatchConfig& cfg, Backend& backend,
                     const std::vector<Topic>& pool, std::uint64_t index);

// Runs cfg.iterations debates against `backend`, appending each record to
// cfg.out_path as it completes. Records are written in run-index order
// regardless of worker count, so logs are byte-identical for any parallelism.
// The out file must not already contain records (see resume_batch).
BatchResult run_batch(const BatchConfig& cfg, Backend& backend,
                      const std::vector<Topic>& pool, ProgressFn progress = {});

// Completes a partial log: verifies the master seed, keeps existing records,
// and executes only the missing run indices.
BatchResult resume_batch(const BatchConfig& cfg, Backend& backend,
                         const std::vector<Topic>& pool, ProgressFn progress = {});

std::vector<DebateRecord> read_run_log(const std::string& path);

}  // namespace madsim
