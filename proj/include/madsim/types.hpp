#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace madsim {

enum class Stance { Pro, Con };

enum class ToxicityLevel { No, Mild, Moderate, Heavy };

enum class TurnKind { Opening, Argument, Concession, Refusal };

enum class DiscussionState { Agreement, Disagreement };

enum class RunStatus {
  ConvergedByConcession,  // an agent answered with the concession token
  ConvergedByModerator,   // the moderator ruled the agents in agreement
  MaxRoundsExceeded,      // argument cap reached before convergence
  Failed,                 // refusal or unrecoverable backend/parse error
};

// Personality overlay injected into one agent's prompt. Short label plus the
// behavioural elaboration; the composed instruction goes into the system slot
// of the toxic prompt variant.
std::string toxicity_description(ToxicityLevel level);
std::string toxicity_behaviour(ToxicityLevel level);
std::string toxicity_instruction(ToxicityLevel level);

struct Topic {
  std::string id;
  std::string domain;
  std::string proposition;

  bool operator==(const Topic&) const = default;
};

struct AgentProfile {
  int agent_id = 0;
  Stance stance = Stance::Pro;
  std::string description;
  std::string claim;
  double persuadability = 0.5;
  ToxicityLevel toxicity = ToxicityLevel::No;

  bool operator==(const AgentProfile&) const = default;
};

struct Turn {
  int index = 0;  // 0-based position in the debate
  int agent_id = 0;
  TurnKind kind = TurnKind::Argument;
  std::string content;

  bool operator==(const Turn&) const = default;
};

struct ModeratorVerdict {
  int round = 0;  // cumulative argument count when the check ran
  DiscussionState state = DiscussionState::Disagreement;
  std::string reason;

  bool operator==(const ModeratorVerdict&) const = default;
};

struct Outcome {
  RunStatus status = RunStatus::Failed;
  std::optional<int> t_conv;  // arguments until convergence; absent for Failed
  std::string failure_reason;

  bool operator==(const Outcome&) const = default;
};

struct DebateRecord {
  std::string run_id;
  std::uint64_t master_seed = 0;
  std::uint64_t run_index = 0;
  Topic topic;
  std::vector<AgentProfile> agents;  // empty if setup failed, otherwise two
  std::vector<Turn> turns;
  std::vector<ModeratorVerdict> verdicts;
  Outcome outcome;
  std::string backend_tag;

  bool operator==(const DebateRecord&) const = default;
};

std::string make_run_id(std::uint64_t master_seed, std::uint64_t run_index);

// Treatment condition of a finished record: the highest toxicity level among
// its agents, or absent when the record has no agents (setup failure).
std::optional<ToxicityLevel> record_condition(const DebateRecord& record);

}  // namespace madsim
