#include "sfnav/errors.hpp"

namespace sfnav {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::empty_label:
      return "empty_label";
    case ErrorCode::out_of_order:
      return "out_of_order";
    case ErrorCode::degenerate_input:
      return "degenerate_input";
    case ErrorCode::goal_parse_failure:
      return "goal_parse_failure";
    case ErrorCode::policy_parse_failure:
      return "policy_parse_failure";
    case ErrorCode::chain_parse_failure:
      return "chain_parse_failure";
    case ErrorCode::dead_end:
      return "dead_end";
    case ErrorCode::illegal_action:
      return "illegal_action";
    case ErrorCode::scene_error:
      return "scene_error";
    case ErrorCode::empty_batch:
      return "empty_batch";
    case ErrorCode::replay_miss:
      return "replay_miss";
    case ErrorCode::backend_error:
      return "backend_error";
    case ErrorCode::config_error:
      return "config_error";
    case ErrorCode::io_error:
      return "io_error";
  }
  return "?";
}

}  // namespace sfnav
