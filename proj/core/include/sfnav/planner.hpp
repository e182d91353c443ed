#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sfnav/graph.hpp"
#include "sfnav/scene.hpp"
#include "sfnav/skills.hpp"

namespace sfnav {

// Token accounting. Verifier tokens are weighted separately when rolled up
// into unified cost (see CostLedger::unified_tokens).
struct TokenUsage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;

  long long total() const { return prompt_tokens + completion_tokens; }
  TokenUsage& operator+=(const TokenUsage& o) {
    prompt_tokens += o.prompt_tokens;
    completion_tokens += o.completion_tokens;
    return *this;
  }
};

// Running cost of one episode. l_* accumulate over planner queries, v_* over
// the cheap per-step verifier (graph alignment).
struct CostLedger {
  long long l_tok = 0;   // planner tokens (prompt + completion)
  long long v_tok = 0;   // verifier tokens
  double l_time = 0.0;   // planner wall seconds
  double v_time = 0.0;   // verifier wall seconds
  int call_count = 0;    // planner invocations (goal extraction counts once,
                         // each replan counts once)

  double unified_tokens(double lambda) const {
    return static_cast<double>(l_tok) +
           lambda * static_cast<double>(v_tok);
  }
  double total_time() const { return l_time + v_time; }
};

enum class PromptStage { goal, policy, chain };
const char* to_string(PromptStage stage);

struct PromptRequest {
  PromptStage stage = PromptStage::goal;
  std::string episode_id;
  std::string system;
  std::string user;
  int attempt = 0;  // 0 = first try; >0 carries an appended format reminder
};

struct BackendReply {
  std::string text;
  TokenUsage usage;
  double duration_s = 0.0;
};

// A language-model-shaped service: one prompt in, one completion out.
// Implementations: live HTTP client, scripted oracle, fixture replay,
// recording wrapper.
class PlannerBackend {
 public:
  virtual ~PlannerBackend() = default;
  virtual BackendReply respond(const PromptRequest& request) = 0;
  virtual const char* kind() const = 0;
};

// One landmark the fast controller should reach, plus the expected local
// graph the verifier aligns against while this subgoal is active.
struct Subgoal {
  std::string target;  // normalized object label
  Skill skill = Skill::approach;
  std::vector<std::string> imagined_objects;  // sorted, deduped, normalized
};

struct SubgoalChain {
  std::string goal;  // extracted goal label
  std::vector<Subgoal> subgoals;
  int created_at = 0;  // timestep of the planning call (0 = pre-loop)
};

// Everything the planner may condition on at a replan point.
struct PlanContext {
  std::string episode_id;
  std::string instruction;
  std::vector<std::string> executed_history;  // reached subgoal labels, in order
  const PerceivedGraph* current_graph = nullptr;  // latest observation
};

struct PlannerOptions {
  int parse_retries = 2;  // extra attempts after the first, per stage
  int max_subgoals = 6;   // chain length clamp
};

// Three-stage slow planner: extract the goal once per episode, then per
// replan pick the next decision and expand it into a subgoal chain with
// imagined neighborhoods. Parse failures retry with a format reminder and
// throw goal/policy/chain_parse_failure after the budget is exhausted. All
// backend usage/time is accumulated into the ledger and call_count.
class SlowPlanner {
 public:
  SlowPlanner(std::shared_ptr<PlannerBackend> backend, PlannerOptions options);

  // Stage one. Caches the goal for the episode; call once.
  std::string extract_goal(const PlanContext& context, CostLedger& ledger);

  // Stages two and three. Requires extract_goal to have run.
  SubgoalChain plan(const PlanContext& context, CostLedger& ledger);

  const std::string& goal() const { return goal_; }
  const PlannerOptions& options() const { return options_; }

 private:
  // Queries one stage with the per-stage retry budget, accumulating usage
  // into the ledger; throws the stage's parse-failure code on exhaustion.
  template <typename T>
  T ask(PromptStage stage, const PlanContext& context, std::string user_prompt,
        CostLedger& ledger,
        const std::function<std::optional<T>(const std::string&)>& parse);

  std::shared_ptr<PlannerBackend> backend_;
  PlannerOptions options_;
  std::string goal_;
  bool goal_set_ = false;
};

// Reply parsers, exposed for tests. Each returns std::nullopt on format
// violations; the planner converts exhaustion into *_parse_failure.
std::optional<std::string> parse_goal_reply(const std::string& text);
std::optional<Subgoal> parse_policy_reply(const std::string& text);
std::optional<std::vector<Subgoal>> parse_chain_reply(const std::string& text,
                                                      int max_subgoals);

}  // namespace sfnav
