#pragma once

#include <string>

#include "sfnav/planner.hpp"

namespace sfnav {

// Prompt templates for the three planner stages. Kept deterministic: same
// context, same bytes. Exposed so fixtures and tests can reproduce request
// hashes exactly.
std::string render_system_prompt(PromptStage stage);
std::string render_goal_prompt(const PlanContext& context);
std::string render_policy_prompt(const PlanContext& context,
                                 const std::string& goal);
std::string render_chain_prompt(const PlanContext& context,
                                const std::string& goal,
                                const Subgoal& decision, int max_subgoals);

// Appended to the user prompt on retry attempts.
std::string format_reminder(PromptStage stage);

}  // namespace sfnav
