#include "madsim/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "madsim/errors.hpp"
#include "madsim/prompts.hpp"
#include "madsim/rng.hpp"

namespace madsim {

using nlohmann::json;

namespace {

// First integer after `marker`, for scraping counts out of rendered prompts.
std::optional<int> int_after(std::string_view text, std::string_view marker) {
  const std::size_t pos = text.find(marker);
  if (pos == std::string_view::npos) return std::nullopt;
  std::size_t i = pos + marker.size();
  while (i < text.size() && text[i] == ' ') ++i;
  std::size_t j = i;
  while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
  if (j == i) return std::nullopt;
  int value = 0;
  std::from_chars(text.data() + i, text.data() + j, value);
  return value;
}

}  // namespace

SyntheticSession::SyntheticSession(std::uint64_t run_seed, ToxicityLevel treatment,
                                   const SyntheticParams& params) {
  // Fixed draw order keeps sessions reproducible even when the refusal rate
  // is zero: the length draw always happens first.
  SplitMix64 stream(run_seed);
  const double u_length = stream.next_unit();
  const double u_refusal = stream.next_unit();
  const auto& lm = params.length_for(treatment);
  target_length_ = sample_debate_length(lm.mean, lm.variance, u_length);
  refuse_ = u_refusal < params.refusal_for(treatment);
}

std::string SyntheticSession::complete(std::string_view prompt, const GenerationParams&) {
  const auto kind = prompts::classify_prompt(prompt);
  if (!kind)
    throw BackendError(BackendErrorKind::Malformed,
                       "synthetic backend cannot classify the prompt");

  switch (*kind) {
    case prompts::PromptKind::PersonaGeneration: {
      const auto count = int_after(prompt, "create a pool of");
      if (!count || *count < 1)
        throw BackendError(BackendErrorKind::Malformed,
                           "persona prompt does not state an agent count");
      std::string reply;
      for (int i = 0; i < *count; ++i) {
        json persona{{"agent_id", i},
                     {"description",
                      "Synthetic debater " + std::to_string(i) + " with a distinct outlook"},
                     {"claim", "Synthetic claim " + std::to_string(i) + " about the proposition"}};
        reply += persona.dump();
        reply += '\n';
      }
      return reply;
    }

    case prompts::PromptKind::AgentTurn:
    case prompts::PromptKind::ToxicAgentTurn: {
      if (refuse_ && !refusal_delivered_) {
        refusal_delivered_ = true;
        return "I can't help with that request.";
      }
      if (arguments_emitted_ < target_length_) {
        ++arguments_emitted_;
        json reply{{"next_answer",
                    "Synthetic argument " + std::to_string(arguments_emitted_) +
                        " supporting my side of the proposition."}};
        return reply.dump();
      }
      return R"({"next_answer": "convinced"})";
    }

    case prompts::PromptKind::ModeratorCheck: {
      const auto nround = int_after(prompt, "discussion (");
      const int round = nround.value_or(arguments_emitted_);
      const bool agreed = arguments_emitted_ >= target_length_;
      // Mirrors the quoting quirk of the template's output example, so the
      // tolerant parser path stays exercised end to end.
      std::string reply = "{\"round': ";
      reply += std::to_string(round);
      reply += ", \"state of discussion\": \"agents are in ";
      reply += agreed ? "agreement" : "disagreement";
      reply += "\", \"reason\": \"Synthetic verdict after ";
      reply += std::to_string(round);
      reply += " arguments.\"}";
      return reply;
    }
  }
  throw BackendError(BackendErrorKind::Malformed, "unreachable prompt kind");
}

std::unique_ptr<SyntheticSession> open_synthetic_session(std::uint64_t run_seed,
                                                         const AgentProfile& a,
                                                         const AgentProfile& b,
                                                         const SyntheticParams& params) {
  if (a.toxicity != ToxicityLevel::No && b.toxicity != ToxicityLevel::No)
    throw std::invalid_argument("at most one agent may carry a toxicity overlay");
  const ToxicityLevel treatment = std::max(a.toxicity, b.toxicity);
  return std::make_unique<SyntheticSession>(run_seed, treatment, params);
}

}  // namespace madsim
