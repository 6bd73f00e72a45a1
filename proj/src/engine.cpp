#include "madsim/engine.hpp"

#include <stdexcept>
#include <utility>

#include "madsim/errors.hpp"
#include "madsim/prompts.hpp"
#include "madsim/rng.hpp"

namespace madsim {

namespace {

// Internal control flow: unwinds the debate loop into a terminal outcome.
struct RunAborted {
  Outcome outcome;
};

std::string stance_tag(const AgentProfile& agent) {
  return (agent.stance == Stance::Pro ? std::string("PRO_") : std::string("CON_")) +
         std::to_string(agent.agent_id);
}

std::string state_phrase(DiscussionState state) {
  return state == DiscussionState::Agreement ? "agreement" : "disagreement";
}

}  // namespace

void validate_debate_agents(const AgentProfile& a, const AgentProfile& b) {
  if (a.agent_id == b.agent_id)
    throw std::invalid_argument("debate agents need distinct agent_ids");
  if (a.stance == b.stance)
    throw std::invalid_argument("debates need one Pro and one Con agent");
  if (a.toxicity != ToxicityLevel::No && b.toxicity != ToxicityLevel::No)
    throw std::invalid_argument("at most one agent may carry a toxicity overlay");
  if (a.persuadability != b.persuadability)
    throw std::invalid_argument("debate agents share one persuadability score");
}

std::array<AgentProfile, 2> generate_agents(Session& session, const Topic& topic,
                                            std::mt19937_64& rng, ToxicityLevel treatment,
                                            double persuadability,
                                            const GenerationParams& params) {
  const std::string prompt = prompts::render_persona_prompt(topic, 2);
  std::vector<prompts::Persona> personas;
  for (int attempt = 0;; ++attempt) {
    const std::string reply = session.complete(prompt, params);
    try {
      personas = prompts::parse_personas(reply, 2);
      break;
    } catch (const MalformedReply&) {
      if (attempt >= kParseRetries) throw;
    }
  }

  const bool flip = bounded(rng, 2) == 1;
  std::array<AgentProfile, 2> agents;
  for (int i = 0; i < 2; ++i) {
    agents[i].agent_id = personas[i].agent_id;
    agents[i].stance = (i == 0) == !flip ? Stance::Pro : Stance::Con;
    agents[i].description = std::move(personas[i].description);
    agents[i].claim = std::move(personas[i].claim);
    agents[i].persuadability = persuadability;
  }
  if (treatment != ToxicityLevel::No) {
    agents[bounded(rng, 2)].toxicity = treatment;
  }
  return agents;
}

std::string transcript_text(std::span<const AgentProfile> agents,
                            std::span<const Turn> turns,
                            std::span<const ModeratorVerdict> verdicts) {
  if (turns.empty() && verdicts.empty()) return std::string(prompts::kEmptyHistory);

  auto tag_for = [&](int agent_id) -> std::string {
    for (const auto& a : agents)
      if (a.agent_id == agent_id) return stance_tag(a);
    return "AGENT_" + std::to_string(agent_id);
  };
  auto verdict_line = [](const ModeratorVerdict& v) {
    std::string line = "[Moderator]: round " + std::to_string(v.round) +
                       " - agents are in " + state_phrase(v.state);
    if (!v.reason.empty()) line += ": " + v.reason;
    return line;
  };

  std::string out;
  std::size_t vi = 0;
  int args_seen = 0;
  for (const auto& turn : turns) {
    if (!out.empty()) out += '\n';
    out += '[' + tag_for(turn.agent_id) + "]: " + turn.content;
    if (turn.kind == TurnKind::Opening || turn.kind == TurnKind::Argument) ++args_seen;
    while (vi < verdicts.size() && verdicts[vi].round == args_seen) {
      out += '\n' + verdict_line(verdicts[vi]);
      ++vi;
    }
  }
  for (; vi < verdicts.size(); ++vi) {
    if (!out.empty()) out += '\n';
    out += verdict_line(verdicts[vi]);
  }
  return out;
}

std::string transcript_text(const DebateRecord& record) {
  return transcript_text(record.agents, record.turns, record.verdicts);
}

DebateRecord run_debate(Session& session, const Topic& topic,
                        std::array<AgentProfile, 2> agents, std::mt19937_64& rng,
                        int max_arguments, const GenerationParams& params) {
  validate_debate_agents(agents[0], agents[1]);
  if (max_arguments < 2) throw std::invalid_argument("max_arguments must be >= 2");

  DebateRecord rec;
  rec.topic = topic;
  rec.agents.assign(agents.begin(), agents.end());
  rec.backend_tag = std::string(session.backend_tag());
  int arg_count = 0;

  auto history = [&] { return transcript_text(rec.agents, rec.turns, rec.verdicts); };

  auto complete_checked = [&](const std::string& prompt) -> std::string {
    try {
      return session.complete(prompt, params);
    } catch (const BackendError& e) {
      const char* label =
          e.kind() == BackendErrorKind::Refusal ? "backend refusal: " : "backend error: ";
      throw RunAborted{{RunStatus::Failed, std::nullopt, label + std::string(e.what())}};
    }
  };

  enum class TurnResult { Argued, Conceded };
  auto take_turn = [&](int who, bool opening) -> TurnResult {
    const AgentProfile& agent = rec.agents[who];
    for (int attempt = 0;; ++attempt) {
      const std::string prompt =
          agent.toxicity == ToxicityLevel::No
              ? prompts::render_agent_prompt(agent, topic, history(), 2)
              : prompts::render_toxic_prompt(agent, topic, history(), 2);
      const std::string reply = complete_checked(prompt);
      prompts::AgentAnswer answer;
      try {
        answer = prompts::parse_agent_answer(reply);
        // Nothing has been argued yet, so an opening concession is treated as
        // a formatting failure rather than a zero-argument convergence.
        if (answer.convinced && opening)
          throw MalformedReply("opening turn answered with the concession token");
      } catch (const RefusalDetected& e) {
        rec.turns.push_back({static_cast<int>(rec.turns.size()), agent.agent_id,
                             TurnKind::Refusal, reply});
        throw RunAborted{{RunStatus::Failed, std::nullopt,
                          "agent refusal: " + std::string(e.what())}};
      } catch (const MalformedReply& e) {
        if (attempt < kParseRetries) continue;
        throw RunAborted{{RunStatus::Failed, std::nullopt,
                          "malformed agent reply: " + std::string(e.what())}};
      }
      if (answer.convinced) {
        rec.turns.push_back({static_cast<int>(rec.turns.size()), agent.agent_id,
                             TurnKind::Concession, std::string(prompts::kConvincedToken)});
        return TurnResult::Conceded;
      }
      rec.turns.push_back({static_cast<int>(rec.turns.size()), agent.agent_id,
                           opening ? TurnKind::Opening : TurnKind::Argument,
                           std::move(answer.argument)});
      ++arg_count;
      return TurnResult::Argued;
    }
  };

  auto consult_moderator = [&]() -> ModeratorVerdict {
    for (int attempt = 0;; ++attempt) {
      const std::string prompt =
          prompts::render_moderator_prompt(topic, 2, arg_count, history());
      const std::string reply = complete_checked(prompt);
      try {
        ModeratorVerdict v = prompts::parse_moderator_verdict(reply, arg_count);
        v.round = arg_count;  // the record keys verdicts by true argument count
        return v;
      } catch (const MalformedReply& e) {
        if (attempt < kParseRetries) continue;
        throw RunAborted{{RunStatus::Failed, std::nullopt,
                          "malformed moderator reply: " + std::string(e.what())}};
      }
    }
  };

  try {
    // The opening pair is the first sequence: both agents state a position,
    // lead order randomized, then the moderator reviews it like any other.
    const int lead = static_cast<int>(bounded(rng, 2));
    take_turn(lead, true);
    take_turn(1 - lead, true);
    for (;;) {
      ModeratorVerdict verdict = consult_moderator();
      rec.verdicts.push_back(verdict);
      if (verdict.state == DiscussionState::Agreement) {
        rec.outcome = {RunStatus::ConvergedByModerator, arg_count, ""};
        break;
      }
      if (arg_count >= max_arguments) {
        rec.outcome = {RunStatus::MaxRoundsExceeded, arg_count, ""};
        break;
      }
      const int first = static_cast<int>(bounded(rng, 2));
      bool finished = false;
      for (int k = 0; k < 2 && !finished; ++k) {
        if (k == 1 && arg_count >= max_arguments) {
          rec.outcome = {RunStatus::MaxRoundsExceeded, arg_count, ""};
          finished = true;
          break;
        }
        if (take_turn(k == 0 ? first : 1 - first, false) == TurnResult::Conceded) {
          rec.outcome = {RunStatus::ConvergedByConcession, arg_count, ""};
          finished = true;
        }
      }
      if (finished) break;
    }
  } catch (const RunAborted& aborted) {
    rec.outcome = aborted.outcome;
  }
  return rec;
}

}  // namespace madsim
