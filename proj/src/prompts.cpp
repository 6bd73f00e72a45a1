#include "madsim/prompts.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "madsim/assets.hpp"
#include "madsim/errors.hpp"

namespace madsim::prompts {

using nlohmann::json;

namespace {

constexpr std::string_view kPersonaMarker = "You want to create a pool of";
constexpr std::string_view kModeratorMarker = "You are moderating a discussion";
constexpr std::string_view kToxicMarker = "**System instruction: ";
constexpr std::string_view kAgentMarker = "you need to find the next argument";

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string snippet(std::string_view s) {
  std::string_view t = trim(s);
  if (t.size() > 120) return std::string(t.substr(0, 117)) + "...";
  return std::string(t);
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string stance_word(Stance s) { return s == Stance::Pro ? "PRO" : "CON"; }

std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Position of the '}' closing the '{' at `open`, respecting JSON strings.
std::optional<std::size_t> find_balanced_close(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i;
  }
  return std::nullopt;
}

// Every parseable top-level JSON object embedded in free-form text.
std::vector<json> extract_objects(std::string_view text) {
  std::vector<json> out;
  std::size_t i = 0;
  while ((i = text.find('{', i)) != std::string_view::npos) {
    const auto close = find_balanced_close(text, i);
    if (!close) {
      ++i;
      continue;
    }
    json j = json::parse(text.substr(i, *close - i + 1), nullptr, false);
    if (!j.is_discarded() && j.is_object()) {
      out.push_back(std::move(j));
      i = *close + 1;
    } else {
      ++i;
    }
  }
  return out;
}

char unescape(char c) {
  switch (c) {
    case 'n': return '\n';
    case 't': return '\t';
    case 'r': return '\r';
    default: return c;  // covers \" \' \\ and anything unrecognized
  }
}

// Lenient `key: value` scan tolerating single quotes, mismatched quotes and
// bare values; the moderator template's own output example needs this.
std::optional<std::string> scan_key_value(std::string_view text, std::string_view key) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string_view::npos) {
    const std::size_t end = pos + key.size();
    const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
    const bool right_ok = end >= text.size() || !is_word_char(text[end]);
    if (!left_ok || !right_ok) {
      ++pos;
      continue;
    }
    std::size_t i = end;
    while (i < text.size() && (text[i] == '"' || text[i] == '\'')) ++i;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size() || text[i] != ':') {
      ++pos;
      continue;
    }
    ++i;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) {
      ++pos;
      continue;
    }
    if (text[i] == '"' || text[i] == '\'') {
      const char quote = text[i++];
      std::string value;
      bool closed = false;
      for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\\' && i + 1 < text.size()) {
          value += unescape(text[++i]);
        } else if (c == quote) {
          closed = true;
          break;
        } else {
          value += c;
        }
      }
      if (!closed) {
        ++pos;
        continue;
      }
      return value;
    }
    const std::size_t stop = text.find_first_of(",}\n", i);
    const std::string_view raw =
        stop == std::string_view::npos ? text.substr(i) : text.substr(i, stop - i);
    std::string value(trim(raw));
    if (value.empty()) {
      ++pos;
      continue;
    }
    return value;
  }
  return std::nullopt;
}

bool is_convinced_token(std::string_view value) {
  std::string low = to_lower(value);
  std::string_view v = low;
  auto strippable = [](char c) {
    return !std::isalnum(static_cast<unsigned char>(c));
  };
  while (!v.empty() && strippable(v.front())) v.remove_prefix(1);
  while (!v.empty() && strippable(v.back())) v.remove_suffix(1);
  return v == kConvincedToken;
}

}  // namespace

std::string_view template_text(PromptKind kind) {
  switch (kind) {
    case PromptKind::PersonaGeneration: return assets::persona_generation_template();
    case PromptKind::AgentTurn: return assets::agent_turn_template();
    case PromptKind::ToxicAgentTurn: return assets::toxic_agent_turn_template();
    case PromptKind::ModeratorCheck: return assets::moderator_check_template();
  }
  return {};
}

std::string render_template(std::string_view tpl,
                            const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tpl.size() + 256);
  std::size_t i = 0;
  while (i < tpl.size()) {
    const char c = tpl[i];
    if (c == '{') {
      if (i + 1 < tpl.size() && tpl[i + 1] == '{') {
        out += '{';
        i += 2;
        continue;
      }
      const std::size_t close = tpl.find('}', i + 1);
      if (close == std::string_view::npos)
        throw MalformedReply("template has an unterminated placeholder");
      const std::string name(tpl.substr(i + 1, close - i - 1));
      out += values.at(name);
      i = close + 1;
    } else if (c == '}') {
      if (i + 1 < tpl.size() && tpl[i + 1] == '}') {
        out += '}';
        i += 2;
        continue;
      }
      throw MalformedReply("template has an unmatched '}'");
    } else {
      out += c;
      ++i;
    }
  }
  return out;
}

std::string persuadability_word(double score) {
  if (!(score >= 0.0 && score <= 1.0))
    throw std::invalid_argument("persuadability outside [0,1]");
  if (score < 1.0 / 3.0) return "low";
  if (score < 2.0 / 3.0) return "moderate";
  return "high";
}

std::string render_persona_prompt(const Topic& topic, int number) {
  if (number < 2) throw std::invalid_argument("persona generation needs at least 2 agents");
  return render_template(template_text(PromptKind::PersonaGeneration),
                         {{"proposition", topic.proposition},
                          {"number", std::to_string(number)}});
}

namespace {

std::string render_turn_prompt(PromptKind kind, const AgentProfile& agent, const Topic& topic,
                               std::string_view history, int n_agents) {
  if (n_agents < 2) throw std::invalid_argument("debates need at least 2 agents");
  std::map<std::string, std::string> values{
      {"proposition", topic.proposition},
      {"agent_dict['procon']", stance_word(agent.stance)},
      {"agent_dict['agent_id']", std::to_string(agent.agent_id)},
      {"nagents", std::to_string(n_agents)},
      {"procon_string", stance_word(agent.stance)},
      {"claim", agent.claim},
      {"description", agent.description},
      {"persuadability", format_score(agent.persuadability)},
      {"persuadability_dict[persuadability]", persuadability_word(agent.persuadability)},
      {"discussion_history",
       history.empty() ? std::string(kEmptyHistory) : std::string(history)},
  };
  if (kind == PromptKind::ToxicAgentTurn)
    values["toxicity_dict[toxicity_level]"] = toxicity_instruction(agent.toxicity);
  return render_template(template_text(kind), values);
}

}  // namespace

std::string render_agent_prompt(const AgentProfile& agent, const Topic& topic,
                                std::string_view history, int n_agents) {
  if (agent.toxicity != ToxicityLevel::No)
    throw std::invalid_argument("toxic agents take the toxic prompt variant");
  return render_turn_prompt(PromptKind::AgentTurn, agent, topic, history, n_agents);
}

std::string render_toxic_prompt(const AgentProfile& agent, const Topic& topic,
                                std::string_view history, int n_agents) {
  if (agent.toxicity == ToxicityLevel::No)
    throw std::invalid_argument("non-toxic agents take the plain prompt variant");
  return render_turn_prompt(PromptKind::ToxicAgentTurn, agent, topic, history, n_agents);
}

std::string render_moderator_prompt(const Topic& topic, int n_agents, int nround,
                                    std::string_view history) {
  if (n_agents < 2) throw std::invalid_argument("debates need at least 2 agents");
  if (nround < 1) throw std::invalid_argument("moderator checks need at least 1 argument");
  return render_template(template_text(PromptKind::ModeratorCheck),
                         {{"proposition", topic.proposition},
                          {"nagents", std::to_string(n_agents)},
                          {"nround", std::to_string(nround)},
                          {"discussion_history",
                           history.empty() ? std::string(kEmptyHistory) : std::string(history)}});
}

std::optional<PromptKind> classify_prompt(std::string_view prompt) {
  if (prompt.find(kPersonaMarker) != std::string_view::npos)
    return PromptKind::PersonaGeneration;
  if (prompt.find(kModeratorMarker) != std::string_view::npos)
    return PromptKind::ModeratorCheck;
  if (prompt.find(kToxicMarker) != std::string_view::npos)
    return PromptKind::ToxicAgentTurn;
  if (prompt.find(kAgentMarker) != std::string_view::npos) return PromptKind::AgentTurn;
  return std::nullopt;
}

std::vector<Persona> parse_personas(std::string_view reply, int expected) {
  if (expected < 1) throw std::invalid_argument("expected persona count must be positive");
  std::vector<Persona> personas;
  for (const json& j : extract_objects(reply)) {
    if (!j.contains("description") || !j["description"].is_string()) continue;
    if (!j.contains("claim") || !j["claim"].is_string()) continue;
    Persona p;
    p.agent_id = static_cast<int>(personas.size());
    p.description = j["description"].get<std::string>();
    p.claim = j["claim"].get<std::string>();
    if (p.description.empty() || p.claim.empty()) continue;
    personas.push_back(std::move(p));
  }
  if (static_cast<int>(personas.size()) != expected) {
    throw MalformedReply("expected " + std::to_string(expected) + " persona objects, found " +
                         std::to_string(personas.size()) + " in: " + snippet(reply));
  }
  return personas;
}

const std::vector<std::string>& default_refusal_markers() {
  static const std::vector<std::string> markers{
      "i can't help",   "i can\xE2\x80\x99t help",   "i cannot help",
      "i can't assist", "i can\xE2\x80\x99t assist", "i cannot assist",
      "i must decline", "i am unable to",            "i'm unable to",
  };
  return markers;
}

AgentAnswer parse_agent_answer(std::string_view reply) {
  return parse_agent_answer(reply, default_refusal_markers());
}

AgentAnswer parse_agent_answer(std::string_view reply,
                               const std::vector<std::string>& refusal_markers) {
  std::optional<std::string> value;
  for (const json& j : extract_objects(reply)) {
    if (j.contains("next_answer") && j["next_answer"].is_string()) {
      value = j["next_answer"].get<std::string>();
      break;
    }
  }
  if (!value) value = scan_key_value(reply, "next_answer");
  if (!value) {
    const std::string low = to_lower(reply);
    for (const auto& marker : refusal_markers) {
      if (low.find(to_lower(marker)) != std::string::npos)
        throw RefusalDetected("agent declined to answer: " + snippet(reply));
    }
    throw MalformedReply("no next_answer in agent reply: " + snippet(reply));
  }
  if (is_convinced_token(*value)) return AgentAnswer{true, ""};
  if (value->empty()) throw MalformedReply("agent reply carries an empty argument");
  return AgentAnswer{false, *value};
}

ModeratorVerdict parse_moderator_verdict(std::string_view reply, int nround) {
  ModeratorVerdict verdict;
  verdict.round = nround;

  std::optional<std::string> state = scan_key_value(reply, "state of discussion");
  if (!state) state = scan_key_value(reply, "state_of_discussion");
  if (!state)
    throw MalformedReply("no discussion state in moderator reply: " + snippet(reply));
  const std::string low = to_lower(*state);
  if (low.find("disagreement") != std::string::npos) {
    verdict.state = DiscussionState::Disagreement;
  } else if (low.find("agreement") != std::string::npos) {
    verdict.state = DiscussionState::Agreement;
  } else {
    throw MalformedReply("unrecognized discussion state: " + snippet(*state));
  }

  if (const auto round = scan_key_value(reply, "round")) {
    const std::string_view r = trim(*round);
    int parsed = 0;
    const auto [ptr, ec] = std::from_chars(r.data(), r.data() + r.size(), parsed);
    if (ec == std::errc() && ptr == r.data() + r.size()) verdict.round = parsed;
  }
  if (auto reason = scan_key_value(reply, "reason")) verdict.reason = std::move(*reason);
  return verdict;
}

}  // namespace madsim::prompts
