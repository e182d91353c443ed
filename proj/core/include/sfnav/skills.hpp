#pragma once

#include <optional>
#include <string_view>

namespace sfnav {

// Closed set of subgoal-execution modes. Backend output naming anything else
// is rejected at parse time.
enum class Skill { approach, through, go_up, go_down };

// Accepts the canonical token (approach|through|go_up|go_down), case
// insensitive, with spaces or dashes in place of the underscore.
std::optional<Skill> parse_skill(std::string_view raw);

const char* to_string(Skill skill);

}  // namespace sfnav
