#pragma once

#include <array>
#include <random>
#include <span>
#include <string>

#include "madsim/backend.hpp"
#include "madsim/types.hpp"

namespace madsim {

// Parse retries granted per model exchange before the run is abandoned.
inline constexpr int kParseRetries = 2;

// Checks a debate pair: one Pro and one Con, at most one toxic agent,
// matching persuadability. Throws std::invalid_argument.
void validate_debate_agents(const AgentProfile& a, const AgentProfile& b);

// Generates two personas for the topic and assigns stances, ids and the
// toxicity overlay. Consumes two draws from `rng`: the stance flip and, when
// `treatment` is active, the toxic-agent pick. Parse and backend errors
// propagate after the retry budget.
std::array<AgentProfile, 2> generate_agents(Session& session, const Topic& topic,
                                            std::mt19937_64& rng, ToxicityLevel treatment,
                                            double persuadability,
                                            const GenerationParams& params);

// Plays one full debate. Opening turns in random order, then repeated
// sequences of two turn opportunities with a moderator check after each
// completed sequence; stops on concession, moderator-declared agreement, the
// argument cap, or failure. Never throws for in-run failures; they end up in
// the record's outcome.
DebateRecord run_debate(Session& session, const Topic& topic,
                        std::array<AgentProfile, 2> agents, std::mt19937_64& rng,
                        int max_arguments, const GenerationParams& params);

// Renders the running discussion as prompt history: one line per turn tagged
// with the speaker, with each moderator verdict after the turn that completed
// its round. Empty input renders as the empty-history placeholder.
std::string transcript_text(std::span<const AgentProfile> agents,
                            std::span<const Turn> turns,
                            std::span<const ModeratorVerdict> verdicts);
std::string transcript_text(const DebateRecord& record);

}  // namespace madsim
