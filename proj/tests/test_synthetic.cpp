#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "madsim/errors.hpp"
#include "madsim/prompts.hpp"
#include "madsim/synthetic.hpp"

using namespace madsim;
using namespace madsim::prompts;

namespace {

Topic test_topic() { return {"t03", "CMV", "Capitalism Cannot Be Reformed"}; }

AgentProfile agent_for(Stance stance, ToxicityLevel tox = ToxicityLevel::No) {
  AgentProfile a;
  a.agent_id = stance == Stance::Pro ? 0 : 1;
  a.stance = stance;
  a.description = "desc";
  a.claim = "claim";
  a.toxicity = tox;
  return a;
}

SyntheticParams forced_length(int length, double refusal = 0.0) {
  SyntheticParams p;
  for (auto& lm : p.length) lm = {static_cast<double>(length), 1e-12};
  p.refusal_rate = {refusal, refusal, refusal, refusal};
  return p;
}

std::string agent_prompt(const SyntheticParams&, std::string_view history = "") {
  return render_agent_prompt(agent_for(Stance::Pro), test_topic(), history, 2);
}

}  // namespace

TEST_CASE("sessions are deterministic in the run seed") {
  const SyntheticParams params;
  for (std::uint64_t seed : {0ull, 1ull, 99ull, 0xFFFFFFFFull}) {
    SyntheticSession a(seed, ToxicityLevel::No, params);
    SyntheticSession b(seed, ToxicityLevel::No, params);
    CHECK(a.target_length() == b.target_length());
    CHECK(a.will_refuse() == b.will_refuse());
    const std::string prompt = agent_prompt(params);
    CHECK(a.complete(prompt, {}) == b.complete(prompt, {}));
  }
}

TEST_CASE("target lengths are at least 2 and spread across seeds") {
  const SyntheticParams params;
  std::set<int> lengths;
  double sum = 0.0;
  const int n = 2000;
  for (int seed = 0; seed < n; ++seed) {
    SyntheticSession s(seed, ToxicityLevel::No, params);
    REQUIRE(s.target_length() >= 2);
    lengths.insert(s.target_length());
    sum += s.target_length();
  }
  CHECK(lengths.size() >= 8);
  CHECK(std::fabs(sum / n - 9.40) < 0.3);
}

TEST_CASE("treatment selects the matching length model") {
  SyntheticParams params;
  params.length[static_cast<int>(ToxicityLevel::Mild)] = {30.0, 1e-12};
  SyntheticSession mild(5, ToxicityLevel::Mild, params);
  CHECK(mild.target_length() == 30);
  SyntheticSession control(5, ToxicityLevel::No, params);
  CHECK(control.target_length() != 30);
}

TEST_CASE("refusal rates hold across seeds") {
  const SyntheticParams params;  // heavy refuses half the time by default
  int refusing = 0;
  const int n = 2000;
  for (int seed = 0; seed < n; ++seed) {
    if (SyntheticSession(seed, ToxicityLevel::Heavy, params).will_refuse()) ++refusing;
    CHECK_FALSE(SyntheticSession(seed, ToxicityLevel::No, params).will_refuse());
  }
  CHECK(refusing > n / 2 - 100);
  CHECK(refusing < n / 2 + 100);
}

TEST_CASE("persona prompts get as many personas as requested") {
  SyntheticSession s(1, ToxicityLevel::No, {});
  const auto two = parse_personas(s.complete(render_persona_prompt(test_topic(), 2), {}), 2);
  CHECK(two.size() == 2);
  const auto three =
      parse_personas(s.complete(render_persona_prompt(test_topic(), 3), {}), 3);
  CHECK(three.size() == 3);
  CHECK(three[0].description != three[1].description);
}

TEST_CASE("agents argue up to the target length and then concede") {
  const auto params = forced_length(4);
  SyntheticSession s(3, ToxicityLevel::No, params);
  REQUIRE(s.target_length() == 4);
  for (int i = 1; i <= 4; ++i) {
    const auto answer = parse_agent_answer(s.complete(agent_prompt(params), {}));
    CHECK_FALSE(answer.convinced);
    CHECK(!answer.argument.empty());
  }
  CHECK(parse_agent_answer(s.complete(agent_prompt(params), {})).convinced);
  CHECK(parse_agent_answer(s.complete(agent_prompt(params), {})).convinced);
}

TEST_CASE("the moderator agrees exactly when the target is reached") {
  const auto params = forced_length(3);
  SyntheticSession s(3, ToxicityLevel::No, params);
  auto moderator_state = [&](int nround) {
    const std::string prompt = render_moderator_prompt(test_topic(), 2, nround, "h");
    return parse_moderator_verdict(s.complete(prompt, {}), nround);
  };
  s.complete(agent_prompt(params), {});
  s.complete(agent_prompt(params), {});
  auto v = moderator_state(2);
  CHECK(v.state == DiscussionState::Disagreement);
  CHECK(v.round == 2);  // scraped back out of the prompt
  s.complete(agent_prompt(params), {});
  v = moderator_state(3);
  CHECK(v.state == DiscussionState::Agreement);
  CHECK(v.round == 3);
}

TEST_CASE("a refusing session replaces only the first agent turn") {
  const auto params = forced_length(3, 1.0);
  SyntheticSession s(11, ToxicityLevel::Heavy, params);
  REQUIRE(s.will_refuse());
  const std::string first = s.complete(agent_prompt(params), {});
  CHECK(first == "I can't help with that request.");
  CHECK_THROWS_AS(parse_agent_answer(first), RefusalDetected);
  // After the refusal the script continues normally.
  CHECK_FALSE(parse_agent_answer(s.complete(agent_prompt(params), {})).convinced);
}

TEST_CASE("refusals do not touch persona generation") {
  const auto params = forced_length(3, 1.0);
  SyntheticSession s(11, ToxicityLevel::Heavy, params);
  CHECK_NOTHROW(parse_personas(s.complete(render_persona_prompt(test_topic(), 2), {}), 2));
}

TEST_CASE("unclassifiable prompts are malformed backend errors") {
  SyntheticSession s(1, ToxicityLevel::No, {});
  try {
    s.complete("tell me a story", {});
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.kind() == BackendErrorKind::Malformed);
  }
}

TEST_CASE("session opening from an agent pair uses the toxic agent's level") {
  SyntheticParams params;
  params.length[static_cast<int>(ToxicityLevel::Moderate)] = {25.0, 1e-12};
  const auto session = open_synthetic_session(
      9, agent_for(Stance::Pro), agent_for(Stance::Con, ToxicityLevel::Moderate), params);
  CHECK(session->target_length() == 25);
  CHECK_THROWS_AS(open_synthetic_session(9, agent_for(Stance::Pro, ToxicityLevel::Mild),
                                         agent_for(Stance::Con, ToxicityLevel::Heavy),
                                         params),
                  std::invalid_argument);
}

TEST_CASE("backend wrapper opens scripted sessions") {
  SyntheticBackend backend(forced_length(5));
  CHECK(backend.tag() == "synthetic");
  const auto session = backend.open_session(4, ToxicityLevel::No);
  CHECK(session->backend_tag() == "synthetic");
  const auto answer =
      parse_agent_answer(session->complete(agent_prompt(forced_length(5)), {}));
  CHECK_FALSE(answer.convinced);
}
