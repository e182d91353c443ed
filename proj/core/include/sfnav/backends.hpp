#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sfnav/planner.hpp"
#include "sfnav/scene.hpp"

namespace sfnav {

// ---------------------------------------------------------------------------
// Scripted oracle

// Synthetic usage model so oracle runs exercise the same accounting paths as
// live ones. Tokens are derived from prompt/reply lengths; time from tokens.
// Synthetic cost model so token and time plumbing can be exercised without a
// live endpoint; zero by default.
struct OracleCosts {
  double prompt_tokens_per_char = 0.0;
  double completion_tokens_per_char = 0.0;
  double seconds_per_token = 0.0;
};

// Answers planner prompts from the scene's route annotations: the goal is the
// episode's goal object, decisions walk the annotated route, chains carry the
// route neighborhoods as imagined graphs. Falls back to heading straight for
// the goal when the route is exhausted or missing.
class OraclePlannerBackend : public PlannerBackend {
 public:
  OraclePlannerBackend(const Scene& scene, const EpisodeSuite& suite,
                       OracleCosts costs = {});

  BackendReply respond(const PromptRequest& request) override;
  const char* kind() const override { return "oracle"; }

 private:
  struct EpisodeScript {
    const Episode* episode = nullptr;
    const Route* route = nullptr;
  };
  const EpisodeScript& script_for(const std::string& episode_id) const;

  const Scene& scene_;
  OracleCosts costs_;
  std::map<std::string, EpisodeScript> scripts_;
};

// ---------------------------------------------------------------------------
// Live HTTP backend (chat-completions shape)

struct LlmConfig {
  std::string base_url;      // e.g. "http://127.0.0.1:8080"
  std::string model;         // model identifier sent in the request body
  std::string api_key_env = "SFNAV_API_KEY";  // credential env var name; the
                                              // key itself never appears in
                                              // config files
  double temperature = 0.0;
  int max_tokens = 512;
  int timeout_s = 60;
};

class LlmBackend : public PlannerBackend {
 public:
  // Reads the credential from the named environment variable; throws
  // config_error when unset or empty.
  explicit LlmBackend(LlmConfig config);

  BackendReply respond(const PromptRequest& request) override;
  const char* kind() const override { return "llm"; }

  const LlmConfig& config() const { return config_; }

 private:
  LlmConfig config_;
  std::string api_key_;
};

// ---------------------------------------------------------------------------
// Fixtures: record/replay

// Stable 64-bit hash of a prompt request (FNV-1a over stage, episode id,
// system and user text; attempt excluded so retries replay in sequence).
std::uint64_t request_hash(const PromptRequest& request);

struct FixtureRecord {
  std::uint64_t key = 0;  // request_hash of the originating request
  PromptStage stage = PromptStage::goal;
  std::string episode_id;
  std::string reply_text;
  TokenUsage usage;
  double duration_s = 0.0;
};

std::vector<FixtureRecord> load_fixtures(const std::string& path);
void save_fixtures(const std::vector<FixtureRecord>& records,
                   const std::string& path);

// Wraps any backend and captures its replies in fixture form.
class RecordingBackend : public PlannerBackend {
 public:
  explicit RecordingBackend(std::shared_ptr<PlannerBackend> inner);

  BackendReply respond(const PromptRequest& request) override;
  const char* kind() const override { return "recording"; }

  const std::vector<FixtureRecord>& records() const { return records_; }

 private:
  std::shared_ptr<PlannerBackend> inner_;
  std::vector<FixtureRecord> records_;
};

// Replays recorded replies keyed by request hash. Each key holds a queue so
// repeated identical requests (retries, revisits) replay in recorded order;
// queues advance per episode independently, which keeps batch-parallel runs
// deterministic. Throws replay_miss when no record remains for a request.
class ReplayBackend : public PlannerBackend {
 public:
  explicit ReplayBackend(std::vector<FixtureRecord> records);

  BackendReply respond(const PromptRequest& request) override;
  const char* kind() const override { return "replay"; }

 private:
  std::map<std::uint64_t, std::vector<const FixtureRecord*>> queues_;
  std::map<std::uint64_t, std::size_t> cursors_;
  std::vector<FixtureRecord> records_;
};

}  // namespace sfnav
