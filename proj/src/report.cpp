#include "madsim/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "madsim/errors.hpp"
#include "madsim/serialize.hpp"

namespace madsim::report {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string full_precision(double v) { return fmt("%.17g", v); }

}  // namespace

LogSummary summarize_log(const std::string& path) {
  LogSummary summary;
  summary.path = path;
  const std::vector<DebateRecord> records = read_run_log(path);
  if (records.empty()) throw ConfigError("run log '" + path + "' has no records");

  std::set<ToxicityLevel> levels;
  for (const auto& r : records) {
    if (const auto level = record_condition(r)) levels.insert(*level);
    switch (r.outcome.status) {
      case RunStatus::ConvergedByConcession:
      case RunStatus::ConvergedByModerator:
        summary.partition.valid.push_back(r);
        break;
      case RunStatus::MaxRoundsExceeded:
        summary.partition.capped.push_back(r);
        break;
      case RunStatus::Failed:
        summary.partition.failed.push_back(r);
        break;
    }
  }
  if (levels.empty())
    throw ConfigError("run log '" + path + "' has no records with agents; condition unknown");
  if (levels.size() > 1)
    throw ConfigError("run log '" + path + "' mixes toxicity conditions");
  summary.level = *levels.begin();
  return summary;
}

Analysis analyze(const std::vector<LogSummary>& logs) {
  Analysis analysis;
  std::vector<const LogSummary*> retained;
  for (const auto& log : logs) {
    if (log.level == ToxicityLevel::Heavy) {
      // Refusals dominate heavy sessions, so its convergence times would
      // describe the surviving minority, not the condition.
      analysis.heavy_excluded.push_back(
          {log.path, log.partition.total(), log.partition.failed.size()});
      continue;
    }
    retained.push_back(&log);
  }
  if (retained.empty())
    throw ConfigError("analysis needs at least one non-heavy run log");

  std::size_t controls = 0;
  std::set<ToxicityLevel> seen;
  for (const auto* log : retained) {
    if (log->level == ToxicityLevel::No) ++controls;
    if (!seen.insert(log->level).second)
      throw ConfigError("duplicate run logs for condition '" + to_string(log->level) + "'");
    if (log->partition.valid.size() < 2)
      throw ConfigError("run log '" + log->path + "' has " +
                        std::to_string(log->partition.valid.size()) +
                        " valid runs; at least 2 are required");
  }
  if (controls != 1)
    throw ConfigError("analysis requires exactly one control (no-toxicity) run log, got " +
                      std::to_string(controls));

  std::sort(retained.begin(), retained.end(), [](const LogSummary* a, const LogSummary* b) {
    return static_cast<int>(a->level) < static_cast<int>(b->level);
  });

  const LogSummary* control = retained.front();
  const stats::GroupStats control_stats =
      stats::group_stats(control->level, control->partition.valid);
  for (const auto* log : retained) {
    const stats::GroupStats gs =
        log == control ? control_stats : stats::group_stats(log->level, log->partition.valid);
    analysis.groups.push_back(gs);
    analysis.histograms.emplace_back(log->level, stats::histogram(log->partition.valid));
    if (log == control) continue;
    const stats::WelchResult w = stats::welch_test(control_stats, gs);
    analysis.comparisons.push_back(
        {log->level, stats::pct_increase(control_stats, gs), w.t, w.dof, w.p});
  }
  return analysis;
}

std::string summary_table(const Analysis& analysis) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %6s %9s %9s %10s %9s %9s %11s\n", "level", "n",
                "mean", "variance", "increase", "t", "dof", "p");
  out += line;
  for (const auto& g : analysis.groups) {
    const auto cmp = std::find_if(
        analysis.comparisons.begin(), analysis.comparisons.end(),
        [&](const Comparison& c) { return c.treatment == g.label; });
    if (cmp == analysis.comparisons.end()) {
      std::snprintf(line, sizeof(line), "%-10s %6zu %9.4f %9.4f %10s %9s %9s %11s\n",
                    to_string(g.label).c_str(), g.n, g.mean, g.variance, "-", "-", "-", "-");
    } else {
      std::snprintf(line, sizeof(line), "%-10s %6zu %9.4f %9.4f %9.2f%% %9.4f %9.1f %11.3e\n",
                    to_string(g.label).c_str(), g.n, g.mean, g.variance, cmp->pct, cmp->t,
                    cmp->dof, cmp->p);
    }
    out += line;
  }
  for (const auto& note : analysis.heavy_excluded) {
    out += "note: heavy log '" + note.path + "' excluded from statistics (" +
           std::to_string(note.failed) + " of " + std::to_string(note.total) +
           " runs failed, mostly refusals)\n";
  }
  out += "\nComparisons use Welch's unequal-variance t-test against the control "
         "(no-toxicity) group.\n";
  return out;
}

std::string summary_csv(const Analysis& analysis) {
  std::string out = "level,n,mean,variance,pct_increase,t,dof,p\n";
  for (const auto& g : analysis.groups) {
    const auto cmp = std::find_if(
        analysis.comparisons.begin(), analysis.comparisons.end(),
        [&](const Comparison& c) { return c.treatment == g.label; });
    out += to_string(g.label) + ',' + std::to_string(g.n) + ',' + full_precision(g.mean) +
           ',' + full_precision(g.variance) + ',';
    if (cmp == analysis.comparisons.end()) {
      out += "-,-,-,-";
    } else {
      out += full_precision(cmp->pct) + ',' + full_precision(cmp->t) + ',' +
             full_precision(cmp->dof) + ',' + full_precision(cmp->p);
    }
    out += '\n';
  }
  return out;
}

std::string histogram_csv(const std::vector<std::pair<int, std::uint64_t>>& bins) {
  std::string out = "t_conv,count\n";
  for (const auto& [value, count] : bins)
    out += std::to_string(value) + ',' + std::to_string(count) + '\n';
  return out;
}

void write_analysis_files(const Analysis& analysis, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());

  auto write_file = [&](const std::string& name, const std::string& content) {
    const std::string path = out_dir + "/" + name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw IoError("cannot write '" + path + "'");
  };
  write_file("summary.csv", summary_csv(analysis));
  for (const auto& [level, bins] : analysis.histograms)
    write_file("hist_" + to_string(level) + ".csv", histogram_csv(bins));
}

}  // namespace madsim::report
