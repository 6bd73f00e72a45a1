#pragma once

#include <memory>

#include "madsim/backend.hpp"

namespace madsim {

// Scripted stand-in for a live model. Classifies each prompt by template
// markers and replies in the exact formats the parsers expect. Per session it
// draws a target debate length L = max(2, round(N(mean, variance))) and, with
// the configured probability, a refusal that replaces the first agent turn.
// Agents argue while fewer than L arguments exist, then concede; the
// moderator reports agreement once the argument count reaches L.
class SyntheticSession final : public Session {
 public:
  SyntheticSession(std::uint64_t run_seed, ToxicityLevel treatment,
                   const SyntheticParams& params);

  std::string complete(std::string_view prompt, const GenerationParams& params) override;
  std::string_view backend_tag() const override { return "synthetic"; }

  int target_length() const { return target_length_; }
  bool will_refuse() const { return refuse_; }

 private:
  int target_length_ = 2;
  bool refuse_ = false;
  bool refusal_delivered_ = false;
  int arguments_emitted_ = 0;
};

// Convenience for driving a session from an already-built agent pair;
// validates that at most one agent is toxic and uses that agent's level.
std::unique_ptr<SyntheticSession> open_synthetic_session(std::uint64_t run_seed,
                                                         const AgentProfile& a,
                                                         const AgentProfile& b,
                                                         const SyntheticParams& params);

class SyntheticBackend final : public Backend {
 public:
  explicit SyntheticBackend(SyntheticParams params) : params_(params) {}

  std::unique_ptr<Session> open_session(std::uint64_t run_seed,
                                        ToxicityLevel treatment) override {
    return std::make_unique<SyntheticSession>(run_seed, treatment, params_);
  }

  std::string_view tag() const override { return "synthetic"; }

 private:
  SyntheticParams params_;
};

}  // namespace madsim
