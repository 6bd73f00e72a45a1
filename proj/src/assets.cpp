#include "madsim/assets.hpp"

#include <cstddef>

namespace madsim::assets {

namespace {
#include "persona_generation.inc"
#include "agent_turn.inc"
#include "toxic_agent_turn.inc"
#include "moderator_check.inc"
#include "topics.inc"

std::string_view view(const unsigned char* bytes, std::size_t size) {
  return {reinterpret_cast<const char*>(bytes), size};
}
}  // namespace

std::string_view persona_generation_template() {
  return view(k_persona_generation_bytes, k_persona_generation_size);
}

std::string_view agent_turn_template() {
  return view(k_agent_turn_bytes, k_agent_turn_size);
}

std::string_view toxic_agent_turn_template() {
  return view(k_toxic_agent_turn_bytes, k_toxic_agent_turn_size);
}

std::string_view moderator_check_template() {
  return view(k_moderator_check_bytes, k_moderator_check_size);
}

std::string_view topics_file() { return view(k_topics_bytes, k_topics_size); }

}  // namespace madsim::assets
