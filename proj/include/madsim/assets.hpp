#pragma once

#include <string_view>

namespace madsim::assets {

// Embedded copies of the files under data/. Byte-identical to the originals,
// trailing whitespace included.
std::string_view persona_generation_template();
std::string_view agent_turn_template();
std::string_view toxic_agent_turn_template();
std::string_view moderator_check_template();
std::string_view topics_file();

}  // namespace madsim::assets
