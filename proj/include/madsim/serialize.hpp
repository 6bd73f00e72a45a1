#pragma once

#include <string>
#include <string_view>

#include "madsim/types.hpp"

namespace madsim {

// Enum <-> string names used in run logs and reports.
std::string to_string(Stance v);
std::string to_string(ToxicityLevel v);
std::string to_string(TurnKind v);
std::string to_string(DiscussionState v);
std::string to_string(RunStatus v);

Stance parse_stance(std::string_view s);
ToxicityLevel parse_toxicity_level(std::string_view s);
TurnKind parse_turn_kind(std::string_view s);
DiscussionState parse_discussion_state(std::string_view s);
RunStatus parse_run_status(std::string_view s);

// One record per line, stable key order, no embedded newlines. decode_record
// rejects missing fields and unknown enum values.
std::string encode_record(const DebateRecord& record);
DebateRecord decode_record(std::string_view line);

}  // namespace madsim
