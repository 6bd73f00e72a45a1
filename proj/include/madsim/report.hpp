#pragma once

#include <string>
#include <vector>

#include "madsim/runner.hpp"
#include "madsim/stats.hpp"
#include "madsim/types.hpp"

namespace madsim::report {

struct LogSummary {
  std::string path;
  ToxicityLevel level = ToxicityLevel::No;
  BatchResult partition;
};

// Loads a run log and determines its treatment condition from the records.
LogSummary summarize_log(const std::string& path);

struct Comparison {
  ToxicityLevel treatment = ToxicityLevel::Mild;
  double pct = 0.0;
  double t = 0.0;
  double dof = 0.0;
  double p = 1.0;
};

struct ExclusionNote {
  std::string path;
  std::size_t total = 0;
  std::size_t failed = 0;
};

struct Analysis {
  std::vector<stats::GroupStats> groups;    // control first, then treatments
  std::vector<Comparison> comparisons;      // one per treatment group
  std::vector<ExclusionNote> heavy_excluded;
  std::vector<std::pair<ToxicityLevel, std::vector<std::pair<int, std::uint64_t>>>> histograms;
};

// Cross-condition analysis. Requires exactly one control (no-toxicity) log
// among the non-heavy inputs and at least 2 valid runs per retained log;
// heavy logs are set aside with a note since refusals make their convergence
// times unrepresentative. Throws ConfigError when preconditions fail.
Analysis analyze(const std::vector<LogSummary>& logs);

// Fixed-width human-readable table with the comparison footnote.
std::string summary_table(const Analysis& analysis);

// Machine-readable summary; full-precision floats, "-" for the control's
// comparison cells.
std::string summary_csv(const Analysis& analysis);

std::string histogram_csv(const std::vector<std::pair<int, std::uint64_t>>& bins);

// Writes summary.csv and hist_<level>.csv files into out_dir.
void write_analysis_files(const Analysis& analysis, const std::string& out_dir);

}  // namespace madsim::report
