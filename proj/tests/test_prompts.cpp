#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "madsim/errors.hpp"
#include "madsim/prompts.hpp"
#include "madsim/rng.hpp"

using namespace madsim;
using namespace madsim::prompts;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const std::map<PromptKind, std::string> kGoldenFiles = {
    {PromptKind::PersonaGeneration, MADSIM_DATA_DIR "/templates/persona_generation.txt"},
    {PromptKind::AgentTurn, MADSIM_DATA_DIR "/templates/agent_turn.txt"},
    {PromptKind::ToxicAgentTurn, MADSIM_DATA_DIR "/templates/toxic_agent_turn.txt"},
    {PromptKind::ModeratorCheck, MADSIM_DATA_DIR "/templates/moderator_check.txt"},
};

// Placeholder names in template order, brace-escapes skipped.
std::vector<std::string> placeholder_names(std::string_view tpl) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < tpl.size();) {
    if (tpl[i] == '{' && i + 1 < tpl.size() && tpl[i + 1] == '{') {
      i += 2;
    } else if (tpl[i] == '}' && i + 1 < tpl.size() && tpl[i + 1] == '}') {
      i += 2;
    } else if (tpl[i] == '{') {
      const auto close = tpl.find('}', i + 1);
      REQUIRE(close != std::string_view::npos);
      names.emplace_back(tpl.substr(i + 1, close - i - 1));
      i = close + 1;
    } else {
      ++i;
    }
  }
  return names;
}

Topic test_topic() { return {"t09", "Culture", "We should ban gambling"}; }

AgentProfile test_agent(Stance stance, ToxicityLevel tox = ToxicityLevel::No) {
  AgentProfile a;
  a.agent_id = stance == Stance::Pro ? 0 : 1;
  a.stance = stance;
  a.description = "a retired croupier who saw the losses up close";
  a.claim = "games of chance prey on the vulnerable";
  a.persuadability = 0.5;
  a.toxicity = tox;
  return a;
}

}  // namespace

TEST_CASE("embedded templates byte-match the shipped files") {
  for (const auto& [kind, path] : kGoldenFiles) {
    const std::string golden = read_file(path);
    CHECK(std::string(template_text(kind)) == golden);
  }
}

TEST_CASE("rendering with sentinels and re-masking reproduces each template") {
  for (const auto& [kind, path] : kGoldenFiles) {
    const std::string golden = read_file(path);
    const auto names = placeholder_names(golden);
    REQUIRE(!names.empty());

    std::map<std::string, std::string> sentinels;
    int counter = 0;
    for (const auto& name : names)
      sentinels.emplace(name, "@@S" + std::to_string(counter++) + "@@");

    const std::string rendered = render_template(golden, sentinels);

    // Re-escape braces, then put the placeholders back; the result must be
    // the original template byte for byte.
    std::string masked;
    for (const char c : rendered) {
      if (c == '{') masked += "{{";
      else if (c == '}') masked += "}}";
      else masked += c;
    }
    for (const auto& [name, sentinel] : sentinels) {
      std::size_t pos;
      while ((pos = masked.find(sentinel)) != std::string::npos)
        masked.replace(pos, sentinel.size(), "{" + name + "}");
    }
    CHECK(masked == golden);
  }
}

TEST_CASE("render_template handles escapes and reports bad slots") {
  CHECK(render_template("a {{b}} c", {}) == "a {b} c");
  CHECK(render_template("{x} and {x}", {{"x", "1"}}) == "1 and 1");
  CHECK_THROWS_AS(render_template("{x}", {}), std::out_of_range);
  CHECK_THROWS_AS(render_template("{unclosed", {}), MalformedReply);
  CHECK_THROWS_AS(render_template("stray } here", {}), MalformedReply);
}

TEST_CASE("persona prompt carries the proposition and the pool size") {
  const std::string prompt = render_persona_prompt(test_topic(), 2);
  CHECK(prompt.find("We should ban gambling") != std::string::npos);
  CHECK(prompt.find("a pool of 2 debate agents") != std::string::npos);
  CHECK(prompt.find("{proposition}") == std::string::npos);
  CHECK(prompt.find("{number}") == std::string::npos);
  // The output example keeps single braces after rendering.
  CHECK(prompt.find("{\"agent_id\": 0, \"description\":") != std::string::npos);
  CHECK_THROWS_AS(render_persona_prompt(test_topic(), 1), std::invalid_argument);
}

TEST_CASE("agent prompt fills identity, stance and persuadability") {
  const AgentProfile agent = test_agent(Stance::Pro);
  const std::string prompt = render_agent_prompt(agent, test_topic(), "", 2);
  CHECK(prompt.find("'PRO_0'") != std::string::npos);
  CHECK(prompt.find("PRO the proposition") != std::string::npos);
  CHECK(prompt.find("'games of chance prey on the vulnerable'") != std::string::npos);
  CHECK(prompt.find("'a retired croupier who saw the losses up close'") != std::string::npos);
  CHECK(prompt.find("0.5") != std::string::npos);
  CHECK(prompt.find("a moderate level") != std::string::npos);
  CHECK(prompt.find(kEmptyHistory) != std::string::npos);
  CHECK(prompt.find("{\"next_answer\": argument_string}") != std::string::npos);
  CHECK(prompt.find("discussion of 2 agents") != std::string::npos);

  const std::string with_history =
      render_agent_prompt(agent, test_topic(), "[PRO_0]: hello", 2);
  CHECK(with_history.find("[PRO_0]: hello") != std::string::npos);
  CHECK(with_history.find(kEmptyHistory) == std::string::npos);
}

TEST_CASE("con agents render with their own tag") {
  const std::string prompt = render_agent_prompt(test_agent(Stance::Con), test_topic(), "", 2);
  CHECK(prompt.find("'CON_1'") != std::string::npos);
  CHECK(prompt.find("CON the proposition") != std::string::npos);
}

TEST_CASE("toxic prompt embeds the composed system instruction") {
  const AgentProfile agent = test_agent(Stance::Con, ToxicityLevel::Heavy);
  const std::string prompt = render_toxic_prompt(agent, test_topic(), "", 2);
  CHECK(prompt.find("**System instruction: Behave in a Aggressive, hostile, cruel manner: "
                    "Insults others, uses inflammatory language, shows contempt for "
                    "opposing agents.**") != std::string::npos);

  const std::string mild =
      render_toxic_prompt(test_agent(Stance::Pro, ToxicityLevel::Mild), test_topic(), "", 2);
  CHECK(mild.find("Passive-aggressive, sarcastic, smug") != std::string::npos);
}

TEST_CASE("prompt variants enforce the toxicity split") {
  CHECK_THROWS_AS(render_agent_prompt(test_agent(Stance::Pro, ToxicityLevel::Mild),
                                      test_topic(), "", 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(render_toxic_prompt(test_agent(Stance::Pro), test_topic(), "", 2),
                  std::invalid_argument);
}

TEST_CASE("moderator prompt embeds the round count twice") {
  const std::string prompt = render_moderator_prompt(test_topic(), 2, 3, "[PRO_0]: hi");
  CHECK(prompt.find("(3 rounds of arguments so far)") != std::string::npos);
  CHECK(prompt.find("{\"round': 3, \"state of discussion\":") != std::string::npos);
  CHECK(prompt.find("moderating a discussion of 2 agents") != std::string::npos);
  CHECK_THROWS_AS(render_moderator_prompt(test_topic(), 2, 0, ""), std::invalid_argument);
}

TEST_CASE("persuadability words cover the three bands") {
  CHECK(persuadability_word(0.0) == "low");
  CHECK(persuadability_word(0.2) == "low");
  CHECK(persuadability_word(1.0 / 3.0) == "moderate");
  CHECK(persuadability_word(0.5) == "moderate");
  CHECK(persuadability_word(0.65) == "moderate");
  CHECK(persuadability_word(2.0 / 3.0) == "high");
  CHECK(persuadability_word(1.0) == "high");
  CHECK_THROWS_AS(persuadability_word(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(persuadability_word(1.1), std::invalid_argument);
}

TEST_CASE("classification identifies every rendered prompt") {
  CHECK(classify_prompt(render_persona_prompt(test_topic(), 2)) ==
        PromptKind::PersonaGeneration);
  CHECK(classify_prompt(render_agent_prompt(test_agent(Stance::Pro), test_topic(), "", 2)) ==
        PromptKind::AgentTurn);
  CHECK(classify_prompt(render_toxic_prompt(test_agent(Stance::Pro, ToxicityLevel::Mild),
                                            test_topic(), "", 2)) ==
        PromptKind::ToxicAgentTurn);
  CHECK(classify_prompt(render_moderator_prompt(test_topic(), 2, 4, "h")) ==
        PromptKind::ModeratorCheck);
  CHECK_FALSE(classify_prompt("what is the weather in paris").has_value());
}

TEST_CASE("personas parse from clean replies and prose-wrapped replies") {
  const auto personas = parse_personas(
      "{\"agent_id\": 0, \"description\": \"an economist\", \"claim\": \"costs outweigh\"}\n"
      "{\"agent_id\": 1, \"description\": \"a parent\", \"claim\": \"children need limits\"}\n",
      2);
  REQUIRE(personas.size() == 2);
  CHECK(personas[0].agent_id == 0);
  CHECK(personas[0].description == "an economist");
  CHECK(personas[1].claim == "children need limits");

  const auto wrapped = parse_personas(
      "Sure! Here are the agents:\n```json\n"
      "{\"agent_id\": 7, \"description\": \"d1\", \"claim\": \"c1\"}\n"
      "{\"agent_id\": 3, \"description\": \"d2\", \"claim\": \"c2\"}\n```\nHope that helps.",
      2);
  REQUIRE(wrapped.size() == 2);
  CHECK(wrapped[0].agent_id == 0);  // renumbered in order of appearance
  CHECK(wrapped[0].description == "d1");
  CHECK(wrapped[1].agent_id == 1);
  CHECK(wrapped[1].description == "d2");
}

TEST_CASE("personas parse from a json array reply") {
  const auto personas = parse_personas(
      "[{\"agent_id\": 0, \"description\": \"d1\", \"claim\": \"c1\"},"
      " {\"agent_id\": 1, \"description\": \"d2\", \"claim\": \"c2\"}]",
      2);
  CHECK(personas.size() == 2);
}

TEST_CASE("persona count mismatches are malformed") {
  CHECK_THROWS_AS(
      parse_personas("{\"agent_id\": 0, \"description\": \"d\", \"claim\": \"c\"}", 2),
      MalformedReply);
  CHECK_THROWS_AS(parse_personas(
                      "{\"agent_id\": 0, \"description\": \"d\", \"claim\": \"c\"}"
                      "{\"agent_id\": 1, \"description\": \"e\", \"claim\": \"f\"}"
                      "{\"agent_id\": 2, \"description\": \"g\", \"claim\": \"h\"}",
                      2),
                  MalformedReply);
  CHECK_THROWS_AS(parse_personas("no json at all", 2), MalformedReply);
  // Objects missing a field or with empty strings do not count.
  CHECK_THROWS_AS(parse_personas(
                      "{\"agent_id\": 0, \"description\": \"d\"}"
                      "{\"agent_id\": 1, \"description\": \"\", \"claim\": \"c\"}",
                      2),
                  MalformedReply);
  CHECK_THROWS_AS(parse_personas("{\"description\": \"d\", \"claim\": \"c\"}", 0),
                  std::invalid_argument);
}

TEST_CASE("agent answers parse strict json, prose wrappers and single quotes") {
  CHECK(parse_agent_answer(R"({"next_answer": "tax revenue funds schools"})") ==
        AgentAnswer{false, "tax revenue funds schools"});
  CHECK(parse_agent_answer(
            "Here is my answer:\n{\"next_answer\": \"regulation works\"}\nThanks!") ==
        AgentAnswer{false, "regulation works"});
  CHECK(parse_agent_answer(R"({'next_answer': 'single quoted'})") ==
        AgentAnswer{false, "single quoted"});
  CHECK(parse_agent_answer(R"("next_answer": "no braces at all")") ==
        AgentAnswer{false, "no braces at all"});
}

TEST_CASE("escaped quotes survive the round trip") {
  const auto a = parse_agent_answer(R"({"next_answer": "He said \"ban it\" twice"})");
  CHECK(a.argument == "He said \"ban it\" twice");
}

TEST_CASE("the concession token is matched loosely but exactly") {
  CHECK(parse_agent_answer(R"({"next_answer": "convinced"})").convinced);
  CHECK(parse_agent_answer(R"({"next_answer": "Convinced."})").convinced);
  CHECK(parse_agent_answer(R"({"next_answer": "  CONVINCED!! "})").convinced);
  CHECK(parse_agent_answer(R"({"next_answer": "\"convinced\""})").convinced);
  const auto sentence = parse_agent_answer(R"({"next_answer": "I am convinced"})");
  CHECK_FALSE(sentence.convinced);
  CHECK(sentence.argument == "I am convinced");
}

TEST_CASE("refusals are detected only when no answer parses") {
  CHECK_THROWS_AS(parse_agent_answer("I can't help with that request."), RefusalDetected);
  CHECK_THROWS_AS(parse_agent_answer("I cannot assist with this debate."), RefusalDetected);
  // A parsable answer wins even if it mentions a marker phrase.
  const auto a = parse_agent_answer(R"({"next_answer": "I can't help noticing a flaw"})");
  CHECK(a.argument == "I can't help noticing a flaw");
  // Custom marker lists replace the defaults.
  CHECK_THROWS_AS(parse_agent_answer("NOPE-NOT-DOING-THIS", {"nope-not-doing-this"}),
                  RefusalDetected);
  CHECK_THROWS_AS(parse_agent_answer("I can't help with that.", {"some other marker"}),
                  MalformedReply);
}

TEST_CASE("unusable agent replies are malformed") {
  CHECK_THROWS_AS(parse_agent_answer(""), MalformedReply);
  CHECK_THROWS_AS(parse_agent_answer("{}"), MalformedReply);
  CHECK_THROWS_AS(parse_agent_answer("just some text"), MalformedReply);
  CHECK_THROWS_AS(parse_agent_answer(R"({"next_answer": ""})"), MalformedReply);
  CHECK_THROWS_AS(parse_agent_answer(R"({"answer": "wrong key"})"), MalformedReply);
}

TEST_CASE("formatted arguments always parse back to themselves") {
  SplitMix64 stream(777);
  const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
      " \t\n\"'\\{}[]:,.!?-_/";
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t len = 1 + stream.next() % 60;
    std::string s;
    for (std::size_t i = 0; i < len; ++i)
      s += alphabet[stream.next() % alphabet.size()];
    const nlohmann::json reply{{"next_answer", s}};
    AgentAnswer parsed{false, ""};
    REQUIRE_NOTHROW(parsed = parse_agent_answer(reply.dump()));
    if (parsed.convinced) continue;  // a random string normalized to the token
    CHECK(parsed.argument == s);
    ++checked;
  }
  CHECK(checked >= 490);
}

TEST_CASE("moderator verdicts parse the template's own quoting quirk") {
  const auto v = parse_moderator_verdict(
      "{\"round': 3, \"state of discussion\": \"agents are in disagreement\", "
      "\"reason\": \"positions are still far apart\"}",
      99);
  CHECK(v.round == 3);
  CHECK(v.state == DiscussionState::Disagreement);
  CHECK(v.reason == "positions are still far apart");
}

TEST_CASE("moderator verdicts parse clean json and underscore keys") {
  const auto v = parse_moderator_verdict(
      R"({"round": 6, "state_of_discussion": "agents are in agreement", "reason": "done"})",
      99);
  CHECK(v.round == 6);
  CHECK(v.state == DiscussionState::Agreement);
  CHECK(v.reason == "done");
}

TEST_CASE("agreement is never inferred from 'disagreement'") {
  const auto v = parse_moderator_verdict(
      R"({"round": 2, "state of discussion": "in disagreement", "reason": "r"})", 2);
  CHECK(v.state == DiscussionState::Disagreement);
  const auto upper = parse_moderator_verdict(
      R"({"round": 2, "state of discussion": "AGENTS ARE IN AGREEMENT", "reason": "r"})", 2);
  CHECK(upper.state == DiscussionState::Agreement);
}

TEST_CASE("missing round falls back to the caller's count") {
  const auto v = parse_moderator_verdict(
      R"({"state of discussion": "agents are in agreement"})", 8);
  CHECK(v.round == 8);
  CHECK(v.reason.empty());
  const auto garbled = parse_moderator_verdict(
      R"({"round": "three-ish", "state of discussion": "agents are in agreement"})", 4);
  CHECK(garbled.round == 4);
}

TEST_CASE("key scanning respects word boundaries") {
  const auto v = parse_moderator_verdict(
      "{\"round': 4, \"state of discussion\": \"agents are in agreement\", "
      "\"reason\": \"background: 7 workarounds discussed\"}",
      99);
  CHECK(v.round == 4);
  CHECK(v.reason == "background: 7 workarounds discussed");
}

TEST_CASE("unusable moderator replies are malformed") {
  CHECK_THROWS_AS(parse_moderator_verdict("", 2), MalformedReply);
  CHECK_THROWS_AS(parse_moderator_verdict("no keys here", 2), MalformedReply);
  CHECK_THROWS_AS(parse_moderator_verdict(R"({"round": 2, "reason": "r"})", 2),
                  MalformedReply);
  CHECK_THROWS_AS(parse_moderator_verdict(
                      R"({"state of discussion": "thoroughly confused", "round": 2})", 2),
                  MalformedReply);
}
