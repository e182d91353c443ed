#include "sfnav/prompts.hpp"

#include <cstdio>

namespace sfnav {

namespace {

const char* kGoalSystem =
    "You are the goal-extraction stage of an indoor navigation planner. "
    "Read the instruction and name the single object the agent must finally "
    "reach.";

const char* kPolicySystem =
    "You are the decision stage of an indoor navigation planner. Given the "
    "instruction, the subgoals already reached, and the objects currently "
    "visible, reason briefly and choose the next landmark object and the "
    "skill to reach it.";

const char* kChainSystem =
    "You are the lookahead stage of an indoor navigation planner. Expand the "
    "chosen decision into a short ordered chain of subgoals, and for each "
    "subgoal list the objects you expect to see around it.";

std::string one_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string context_block(const PlanContext& context) {
  std::string out;
  out += "Instruction: " + context.instruction + "\n";
  out += "Reached subgoals:";
  if (context.executed_history.empty()) {
    out += " (none)";
  } else {
    for (const std::string& h : context.executed_history) out += " " + h + ";";
  }
  out += "\nVisible objects:";
  if (!context.current_graph || context.current_graph->objects.empty()) {
    out += " (none)";
  } else {
    for (const auto& o : context.current_graph->objects) {
      out += " " + o.node.label + " at " + one_decimal(o.edge.distance) + "m;";
    }
  }
  out += "\n";
  return out;
}

}  // namespace

std::string render_system_prompt(PromptStage stage) {
  switch (stage) {
    case PromptStage::goal:
      return kGoalSystem;
    case PromptStage::policy:
      return kPolicySystem;
    case PromptStage::chain:
      return kChainSystem;
  }
  return "";
}

std::string format_reminder(PromptStage stage) {
  switch (stage) {
    case PromptStage::goal:
      return "\nReminder: reply with exactly one line of the form\n"
             "GOAL: <object label>";
    case PromptStage::policy:
      return "\nReminder: end your reply with exactly one line of the form\n"
             "DECISION: <object label> | <approach|through|go_up|go_down>";
    case PromptStage::chain:
      return "\nReminder: reply with a line \"CHAIN:\" followed by a JSON "
             "array of objects, each {\"object\": string, \"skill\": string, "
             "\"imagined_objects\": [string, ...]}.";
  }
  return "";
}

std::string render_goal_prompt(const PlanContext& context) {
  std::string out;
  out += "Instruction: " + context.instruction + "\n";
  out += "Answer with one line:\nGOAL: <object label>\n";
  return out;
}

std::string render_policy_prompt(const PlanContext& context,
                                 const std::string& goal) {
  std::string out = context_block(context);
  out += "Final goal: " + goal + "\n";
  out +=
      "Think step by step about where to head next, then end with one "
      "line:\nDECISION: <object label> | <approach|through|go_up|go_down>\n";
  return out;
}

std::string render_chain_prompt(const PlanContext& context,
                                const std::string& goal,
                                const Subgoal& decision, int max_subgoals) {
  std::string out = context_block(context);
  out += "Final goal: " + goal + "\n";
  out += "Chosen next decision: " + decision.target + " | " +
         to_string(decision.skill) + "\n";
  out += "Expand this into at most " + std::to_string(max_subgoals) +
         " ordered subgoals ending at the decision target or the goal. Reply "
         "with a line \"CHAIN:\" followed by a JSON array of objects, each "
         "{\"object\": string, \"skill\": string, \"imagined_objects\": "
         "[string, ...]}.\n";
  return out;
}

}  // namespace sfnav
