#include "sfnav/skills.hpp"

#include <cctype>
#include <string>

namespace sfnav {

std::optional<Skill> parse_skill(std::string_view raw) {
  std::string token;
  token.reserve(raw.size());
  for (char c : raw) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isspace(u) || c == '-' || c == '_') {
      if (!token.empty() && token.back() != '_') token.push_back('_');
    } else {
      token.push_back(static_cast<char>(std::tolower(u)));
    }
  }
  if (!token.empty() && token.back() == '_') token.pop_back();

  if (token == "approach") return Skill::approach;
  if (token == "through") return Skill::through;
  if (token == "go_up" || token == "goup") return Skill::go_up;
  if (token == "go_down" || token == "godown") return Skill::go_down;
  return std::nullopt;
}

const char* to_string(Skill skill) {
  switch (skill) {
    case Skill::approach:
      return "approach";
    case Skill::through:
      return "through";
    case Skill::go_up:
      return "go_up";
    case Skill::go_down:
      return "go_down";
  }
  return "?";
}

}  // namespace sfnav
