#include "madsim/serialize.hpp"

#include <json.hpp>

#include "madsim/errors.hpp"

namespace madsim {

using nlohmann::json;

namespace {

[[noreturn]] void bad_enum(const char* what, std::string_view value) {
  throw IoError(std::string("unknown ") + what + ": '" + std::string(value) + "'");
}

json turn_to_json(const Turn& t) {
  return json{{"index", t.index},
              {"agent_id", t.agent_id},
              {"kind", to_string(t.kind)},
              {"content", t.content}};
}

Turn turn_from_json(const json& j) {
  Turn t;
  t.index = j.at("index").get<int>();
  t.agent_id = j.at("agent_id").get<int>();
  t.kind = parse_turn_kind(j.at("kind").get<std::string>());
  t.content = j.at("content").get<std::string>();
  return t;
}

json agent_to_json(const AgentProfile& a) {
  return json{{"agent_id", a.agent_id},
              {"stance", to_string(a.stance)},
              {"description", a.description},
              {"claim", a.claim},
              {"persuadability", a.persuadability},
              {"toxicity", to_string(a.toxicity)}};
}

AgentProfile agent_from_json(const json& j) {
  AgentProfile a;
  a.agent_id = j.at("agent_id").get<int>();
  a.stance = parse_stance(j.at("stance").get<std::string>());
  a.description = j.at("description").get<std::string>();
  a.claim = j.at("claim").get<std::string>();
  a.persuadability = j.at("persuadability").get<double>();
  a.toxicity = parse_toxicity_level(j.at("toxicity").get<std::string>());
  return a;
}

json verdict_to_json(const ModeratorVerdict& v) {
  return json{{"round", v.round}, {"state", to_string(v.state)}, {"reason", v.reason}};
}

ModeratorVerdict verdict_from_json(const json& j) {
  ModeratorVerdict v;
  v.round = j.at("round").get<int>();
  v.state = parse_discussion_state(j.at("state").get<std::string>());
  v.reason = j.at("reason").get<std::string>();
  return v;
}

}  // namespace

std::string to_string(Stance v) { return v == Stance::Pro ? "pro" : "con"; }

std::string to_string(ToxicityLevel v) {
  switch (v) {
    case ToxicityLevel::No: return "no";
    case ToxicityLevel::Mild: return "mild";
    case ToxicityLevel::Moderate: return "moderate";
    case ToxicityLevel::Heavy: return "heavy";
  }
  return "no";
}

std::string to_string(TurnKind v) {
  switch (v) {
    case TurnKind::Opening: return "opening";
    case TurnKind::Argument: return "argument";
    case TurnKind::Concession: return "concession";
    case TurnKind::Refusal: return "refusal";
  }
  return "argument";
}

std::string to_string(DiscussionState v) {
  return v == DiscussionState::Agreement ? "agreement" : "disagreement";
}

std::string to_string(RunStatus v) {
  switch (v) {
    case RunStatus::ConvergedByConcession: return "converged_by_concession";
    case RunStatus::ConvergedByModerator: return "converged_by_moderator";
    case RunStatus::MaxRoundsExceeded: return "max_rounds_exceeded";
    case RunStatus::Failed: return "failed";
  }
  return "failed";
}

Stance parse_stance(std::string_view s) {
  if (s == "pro") return Stance::Pro;
  if (s == "con") return Stance::Con;
  bad_enum("stance", s);
}

ToxicityLevel parse_toxicity_level(std::string_view s) {
  if (s == "no") return ToxicityLevel::No;
  if (s == "mild") return ToxicityLevel::Mild;
  if (s == "moderate") return ToxicityLevel::Moderate;
  if (s == "heavy") return ToxicityLevel::Heavy;
  bad_enum("toxicity level", s);
}

TurnKind parse_turn_kind(std::string_view s) {
  if (s == "opening") return TurnKind::Opening;
  if (s == "argument") return TurnKind::Argument;
  if (s == "concession") return TurnKind::Concession;
  if (s == "refusal") return TurnKind::Refusal;
  bad_enum("turn kind", s);
}

DiscussionState parse_discussion_state(std::string_view s) {
  if (s == "agreement") return DiscussionState::Agreement;
  if (s == "disagreement") return DiscussionState::Disagreement;
  bad_enum("discussion state", s);
}

RunStatus parse_run_status(std::string_view s) {
  if (s == "converged_by_concession") return RunStatus::ConvergedByConcession;
  if (s == "converged_by_moderator") return RunStatus::ConvergedByModerator;
  if (s == "max_rounds_exceeded") return RunStatus::MaxRoundsExceeded;
  if (s == "failed") return RunStatus::Failed;
  bad_enum("run status", s);
}

std::string encode_record(const DebateRecord& record) {
  json outcome{{"status", to_string(record.outcome.status)},
               {"failure_reason", record.outcome.failure_reason}};
  if (record.outcome.t_conv) {
    outcome["t_conv"] = *record.outcome.t_conv;
  } else {
    outcome["t_conv"] = nullptr;
  }

  json agents = json::array();
  for (const auto& a : record.agents) agents.push_back(agent_to_json(a));
  json turns = json::array();
  for (const auto& t : record.turns) turns.push_back(turn_to_json(t));
  json verdicts = json::array();
  for (const auto& v : record.verdicts) verdicts.push_back(verdict_to_json(v));

  json j{{"run_id", record.run_id},
         {"master_seed", record.master_seed},
         {"run_index", record.run_index},
         {"topic", {{"id", record.topic.id},
                    {"domain", record.topic.domain},
                    {"proposition", record.topic.proposition}}},
         {"agents", std::move(agents)},
         {"turns", std::move(turns)},
         {"verdicts", std::move(verdicts)},
         {"outcome", std::move(outcome)},
         {"backend_tag", record.backend_tag}};
  return j.dump();
}

DebateRecord decode_record(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw IoError(std::string("run log line is not valid JSON: ") + e.what());
  }
  try {
    DebateRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.run_index = j.at("run_index").get<std::uint64_t>();
    const json& topic = j.at("topic");
    r.topic.id = topic.at("id").get<std::string>();
    r.topic.domain = topic.at("domain").get<std::string>();
    r.topic.proposition = topic.at("proposition").get<std::string>();
    for (const auto& a : j.at("agents")) r.agents.push_back(agent_from_json(a));
    for (const auto& t : j.at("turns")) r.turns.push_back(turn_from_json(t));
    for (const auto& v : j.at("verdicts")) r.verdicts.push_back(verdict_from_json(v));
    const json& outcome = j.at("outcome");
    r.outcome.status = parse_run_status(outcome.at("status").get<std::string>());
    if (!outcome.at("t_conv").is_null()) r.outcome.t_conv = outcome.at("t_conv").get<int>();
    r.outcome.failure_reason = outcome.at("failure_reason").get<std::string>();
    r.backend_tag = j.at("backend_tag").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("run log record is missing or mistypes a field: ") + e.what());
  }
}

}  // namespace madsim
