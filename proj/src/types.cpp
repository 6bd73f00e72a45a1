#include "madsim/types.hpp"

#include <algorithm>
#include <cstdio>

namespace madsim {

std::string toxicity_description(ToxicityLevel level) {
  switch (level) {
    case ToxicityLevel::No:
      return "";
    case ToxicityLevel::Mild:
      return "Passive-aggressive, sarcastic, smug";
    case ToxicityLevel::Moderate:
      return "Condescending, belittling, rude";
    case ToxicityLevel::Heavy:
      return "Aggressive, hostile, cruel";
  }
  return "";
}

std::string toxicity_behaviour(ToxicityLevel level) {
  switch (level) {
    case ToxicityLevel::No:
      return "";
    case ToxicityLevel::Mild:
      return "Belittles others indirectly, implies superiority";
    case ToxicityLevel::Moderate:
      return "Dismisses others' arguments as idiotic or irrelevant, questions their "
             "intelligence or logic";
    case ToxicityLevel::Heavy:
      return "Insults others, uses inflammatory language, shows contempt for opposing agents";
  }
  return "";
}

std::string toxicity_instruction(ToxicityLevel level) {
  if (level == ToxicityLevel::No) return "";
  return "Behave in a " + toxicity_description(level) + " manner: " +
         toxicity_behaviour(level) + ".";
}

std::string make_run_id(std::uint64_t master_seed, std::uint64_t run_index) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%016llx-%06llu",
                static_cast<unsigned long long>(master_seed),
                static_cast<unsigned long long>(run_index));
  return buf;
}

std::optional<ToxicityLevel> record_condition(const DebateRecord& record) {
  if (record.agents.empty()) return std::nullopt;
  ToxicityLevel level = ToxicityLevel::No;
  for (const auto& agent : record.agents) level = std::max(level, agent.toxicity);
  return level;
}

}  // namespace madsim
