#pragma once

#include <stdexcept>
#include <string>

namespace sfnav {

enum class ErrorCode {
  empty_label,
  out_of_order,
  degenerate_input,
  goal_parse_failure,
  policy_parse_failure,
  chain_parse_failure,
  dead_end,
  illegal_action,
  scene_error,
  empty_batch,
  replay_miss,
  backend_error,
  config_error,
  io_error,
};

const char* to_string(ErrorCode code);

// Every recoverable failure in the engine is a NavError with a stable code.
// The batch runner turns codes into per-episode error tags; the CLI turns
// them into diagnostics and a nonzero exit.
class NavError : public std::runtime_error {
 public:
  NavError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sfnav
