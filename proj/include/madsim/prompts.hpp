#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "madsim/types.hpp"

namespace madsim::prompts {

enum class PromptKind { PersonaGeneration, AgentTurn, ToxicAgentTurn, ModeratorCheck };

// The concession token an agent may answer with instead of an argument.
inline constexpr std::string_view kConvincedToken = "convinced";

// Substituted for the history slot before any argument exists.
inline constexpr std::string_view kEmptyHistory = "(no arguments yet)";

// Raw template text as shipped in data/templates/, embedded byte for byte.
std::string_view template_text(PromptKind kind);

// Fills {name} slots from `values`; "{{" and "}}" are literal braces. Throws
// MalformedReply on unbalanced braces, std::out_of_range on a missing value.
std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& values);

// Maps persuadability scores to the adjective used in prompts.
std::string persuadability_word(double score);

std::string render_persona_prompt(const Topic& topic, int number);
std::string render_agent_prompt(const AgentProfile& agent, const Topic& topic,
                                std::string_view history, int n_agents);
std::string render_toxic_prompt(const AgentProfile& agent, const Topic& topic,
                                std::string_view history, int n_agents);
std::string render_moderator_prompt(const Topic& topic, int n_agents, int nround,
                                    std::string_view history);

// Identifies which template produced a prompt, by markers unique to each.
std::optional<PromptKind> classify_prompt(std::string_view prompt);

struct Persona {
  int agent_id = 0;
  std::string description;
  std::string claim;

  bool operator==(const Persona&) const = default;
};

// Persona objects scraped from a generation reply. Exactly `expected` must be
// present; agent_ids are renumbered 0..expected-1 in order of appearance.
std::vector<Persona> parse_personas(std::string_view reply, int expected);

struct AgentAnswer {
  bool convinced = false;
  std::string argument;  // empty when convinced

  bool operator==(const AgentAnswer&) const = default;
};

const std::vector<std::string>& default_refusal_markers();

// Extracts the next_answer payload from an agent reply. Replies matching a
// refusal marker (and carrying no parsable answer) raise RefusalDetected;
// anything else unusable raises MalformedReply.
AgentAnswer parse_agent_answer(std::string_view reply);
AgentAnswer parse_agent_answer(std::string_view reply,
                               const std::vector<std::string>& refusal_markers);

// Extracts state/round/reason from a moderator reply. Tolerates the quoting
// quirks the template itself exhibits; `nround` backfills a missing round.
ModeratorVerdict parse_moderator_verdict(std::string_view reply, int nround);

}  // namespace madsim::prompts
