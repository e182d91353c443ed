#include "sfnav/planner.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "sfnav/errors.hpp"
#include "sfnav/prompts.hpp"

namespace sfnav {

const char* to_string(PromptStage stage) {
  switch (stage) {
    case PromptStage::goal:
      return "goal";
    case PromptStage::policy:
      return "policy";
    case PromptStage::chain:
      return "chain";
  }
  return "?";
}

namespace {

// Last line beginning with `marker` (after optional indentation); returns the
// remainder of that line. Last wins so free-form reasoning above the final
// answer line stays harmless.
std::optional<std::string> last_marked_line(const std::string& text,
                                            const std::string& marker) {
  std::optional<std::string> found;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line.compare(start, marker.size(), marker) == 0) {
      found = line.substr(start + marker.size());
    }
  }
  return found;
}

std::optional<std::string> normalized_or_nullopt(const std::string& raw) {
  try {
    return normalize_label(raw);
  } catch (const NavError&) {
    return std::nullopt;
  }
}

// Shared normalization for parsed subgoals: labels canonical, imagined set
// sorted/deduped and always containing the target itself.
std::optional<Subgoal> finish_subgoal(const std::string& target_raw,
                                      Skill skill,
                                      std::vector<std::string> imagined_raw) {
  auto target = normalized_or_nullopt(target_raw);
  if (!target) return std::nullopt;
  Subgoal out;
  out.target = *target;
  out.skill = skill;
  for (const std::string& raw : imagined_raw) {
    auto label = normalized_or_nullopt(raw);
    if (!label) return std::nullopt;
    out.imagined_objects.push_back(*label);
  }
  out.imagined_objects.push_back(out.target);
  std::sort(out.imagined_objects.begin(), out.imagined_objects.end());
  out.imagined_objects.erase(
      std::unique(out.imagined_objects.begin(), out.imagined_objects.end()),
      out.imagined_objects.end());
  return out;
}

}  // namespace

std::optional<std::string> parse_goal_reply(const std::string& text) {
  auto rest = last_marked_line(text, "GOAL:");
  if (!rest) return std::nullopt;
  return normalized_or_nullopt(*rest);
}

std::optional<Subgoal> parse_policy_reply(const std::string& text) {
  auto rest = last_marked_line(text, "DECISION:");
  if (!rest) return std::nullopt;
  std::size_t bar = rest->find('|');
  if (bar == std::string::npos) return std::nullopt;
  auto skill = parse_skill(rest->substr(bar + 1));
  if (!skill) return std::nullopt;
  return finish_subgoal(rest->substr(0, bar), *skill, {});
}

std::optional<std::vector<Subgoal>> parse_chain_reply(const std::string& text,
                                                      int max_subgoals) {
  std::size_t marker = text.rfind("CHAIN:");
  if (marker == std::string::npos) return std::nullopt;
  std::string payload = text.substr(marker + 6);

  nlohmann::json array = nlohmann::json::parse(payload, nullptr, false);
  if (array.is_discarded() || !array.is_array() || array.empty())
    return std::nullopt;

  std::vector<Subgoal> chain;
  for (const auto& node : array) {
    if (!node.is_object() || !node.contains("object") ||
        !node.contains("skill") || !node["object"].is_string() ||
        !node["skill"].is_string())
      return std::nullopt;
    auto skill = parse_skill(node["skill"].get<std::string>());
    if (!skill) return std::nullopt;
    std::vector<std::string> imagined;
    if (node.contains("imagined_objects")) {
      if (!node["imagined_objects"].is_array()) return std::nullopt;
      for (const auto& o : node["imagined_objects"]) {
        if (!o.is_string()) return std::nullopt;
        imagined.push_back(o.get<std::string>());
      }
    }
    auto subgoal =
        finish_subgoal(node["object"].get<std::string>(), *skill, imagined);
    if (!subgoal) return std::nullopt;
    chain.push_back(std::move(*subgoal));
    if (static_cast<int>(chain.size()) == max_subgoals) break;
  }
  return chain;
}

SlowPlanner::SlowPlanner(std::shared_ptr<PlannerBackend> backend,
                         PlannerOptions options)
    : backend_(std::move(backend)), options_(options) {
  if (!backend_)
    throw NavError(ErrorCode::config_error, "planner needs a backend");
}

template <typename T>
T SlowPlanner::ask(
    PromptStage stage, const PlanContext& context, std::string user_prompt,
    CostLedger& ledger,
    const std::function<std::optional<T>(const std::string&)>& parse) {
  const int attempts = 1 + std::max(0, options_.parse_retries);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    PromptRequest request;
    request.stage = stage;
    request.episode_id = context.episode_id;
    request.system = render_system_prompt(stage);
    request.user =
        attempt == 0 ? user_prompt : user_prompt + format_reminder(stage);
    request.attempt = attempt;

    BackendReply reply = backend_->respond(request);
    ledger.l_tok += reply.usage.total();
    ledger.l_time += reply.duration_s;

    if (auto parsed = parse(reply.text)) return *parsed;
  }
  ErrorCode code = stage == PromptStage::goal     ? ErrorCode::goal_parse_failure
                   : stage == PromptStage::policy ? ErrorCode::policy_parse_failure
                                                  : ErrorCode::chain_parse_failure;
  throw NavError(code, std::string("unparseable ") + to_string(stage) +
                           " reply after " + std::to_string(attempts) +
                           " attempts");
}

std::string SlowPlanner::extract_goal(const PlanContext& context,
                                      CostLedger& ledger) {
  if (context.instruction.empty())
    throw NavError(ErrorCode::goal_parse_failure, "empty instruction");
  ledger.call_count += 1;
  goal_ = ask<std::string>(PromptStage::goal, context,
                           render_goal_prompt(context), ledger,
                           parse_goal_reply);
  goal_set_ = true;
  return goal_;
}

SubgoalChain SlowPlanner::plan(const PlanContext& context, CostLedger& ledger) {
  if (!goal_set_)
    throw NavError(ErrorCode::backend_error,
                   "plan() requires extract_goal() first");
  ledger.call_count += 1;

  Subgoal decision = ask<Subgoal>(PromptStage::policy, context,
                                  render_policy_prompt(context, goal_), ledger,
                                  parse_policy_reply);

  const int max_subgoals = std::max(1, options_.max_subgoals);
  std::vector<Subgoal> subgoals = ask<std::vector<Subgoal>>(
      PromptStage::chain, context,
      render_chain_prompt(context, goal_, decision, max_subgoals), ledger,
      [max_subgoals](const std::string& text) {
        return parse_chain_reply(text, max_subgoals);
      });

  SubgoalChain chain;
  chain.goal = goal_;
  chain.subgoals = std::move(subgoals);
  return chain;
}

}  // namespace sfnav
