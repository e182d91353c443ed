#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "sfnav/backends.hpp"
#include "sfnav/planner.hpp"
#include "sfnav/prompts.hpp"
#include "sfnav/report.hpp"
#include "sfnav/runner.hpp"
#include "test_support.hpp"

using namespace sfnav;
using sfnav_test::corridor;
using sfnav_test::fresh_dir;
using sfnav_test::nav_error_code;

namespace {

// Serves a fixed reply list front to back and keeps every request it saw.
class ScriptedBackend : public PlannerBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies)
      : replies_(std::move(replies)) {}

  BackendReply respond(const PromptRequest& request) override {
    requests.push_back(request);
    if (cursor_ >= replies_.size())
      throw NavError(ErrorCode::backend_error, "script exhausted");
    BackendReply reply;
    reply.text = replies_[cursor_++];
    reply.usage.prompt_tokens = 10;
    reply.usage.completion_tokens = 5;
    reply.duration_s = 0.5;
    return reply;
  }
  const char* kind() const override { return "scripted"; }

  std::vector<PromptRequest> requests;

 private:
  std::vector<std::string> replies_;
  std::size_t cursor_ = 0;
};

PlanContext context_for(const std::string& instruction,
                        std::vector<std::string> executed = {}) {
  PlanContext context;
  context.episode_id = "ep";
  context.instruction = instruction;
  context.executed_history = std::move(executed);
  return context;
}

const std::string kChainReply =
    "CHAIN: [{\"object\": \"Door\", \"skill\": \"through\", "
    "\"imagined_objects\": [\"hall\", \"door\"]}, "
    "{\"object\": \"sofa\", \"skill\": \"approach\"}]";

}  // namespace

TEST_CASE("goal replies parse from the last marked line") {
  CHECK(parse_goal_reply("GOAL: Sofa\n") == "sofa");
  CHECK(parse_goal_reply("let me think\nGOAL: first\nGOAL: second\n") ==
        "second");
  CHECK(parse_goal_reply("  GOAL: kitchen sink") == "kitchen sink");
  CHECK_FALSE(parse_goal_reply("no marker here").has_value());
  CHECK_FALSE(parse_goal_reply("GOAL:   ").has_value());
}

TEST_CASE("policy replies parse target and skill") {
  auto sg = parse_policy_reply("DECISION: door | through");
  REQUIRE(sg.has_value());
  CHECK(sg->target == "door");
  CHECK(sg->skill == Skill::through);
  // The target itself always joins the imagined set.
  CHECK(sg->imagined_objects == std::vector<std::string>{"door"});

  auto up = parse_policy_reply("reasoning...\n  DECISION: Glass Door | GO UP");
  REQUIRE(up.has_value());
  CHECK(up->target == "glass door");
  CHECK(up->skill == Skill::go_up);

  CHECK_FALSE(parse_policy_reply("DECISION: door | sprint").has_value());
  CHECK_FALSE(parse_policy_reply("DECISION: door through").has_value());
  CHECK_FALSE(parse_policy_reply("DECISION:  | approach").has_value());
  CHECK_FALSE(parse_policy_reply("nothing").has_value());
}

TEST_CASE("chain replies parse, normalize, and clamp") {
  auto chain = parse_chain_reply(kChainReply, 6);
  REQUIRE(chain.has_value());
  REQUIRE(chain->size() == 2);
  CHECK((*chain)[0].target == "door");
  CHECK((*chain)[0].skill == Skill::through);
  CHECK((*chain)[0].imagined_objects ==
        std::vector<std::string>{"door", "hall"});  // sorted, deduped
  CHECK((*chain)[1].target == "sofa");
  CHECK((*chain)[1].imagined_objects == std::vector<std::string>{"sofa"});

  auto clamped = parse_chain_reply(kChainReply, 1);
  REQUIRE(clamped.has_value());
  CHECK(clamped->size() == 1);

  CHECK_FALSE(parse_chain_reply("CHAIN: not json", 6).has_value());
  CHECK_FALSE(parse_chain_reply("CHAIN: []", 6).has_value());
  CHECK_FALSE(parse_chain_reply("no marker", 6).has_value());
  CHECK_FALSE(
      parse_chain_reply("CHAIN: [{\"object\": \"door\"}]", 6).has_value());
  CHECK_FALSE(parse_chain_reply(
                  "CHAIN: [{\"object\": \"door\", \"skill\": \"fly\"}]", 6)
                  .has_value());
}

TEST_CASE("planner accumulates usage and call counts across stages") {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{
      "GOAL: sofa",
      "DECISION: door | through",
      kChainReply,
  });
  SlowPlanner planner(backend, PlannerOptions{});
  CostLedger ledger;

  PlanContext context = context_for("walk through the door to the sofa");
  CHECK(planner.extract_goal(context, ledger) == "sofa");
  CHECK(ledger.call_count == 1);
  CHECK(ledger.l_tok == 15);
  CHECK(ledger.l_time == 0.5);

  SubgoalChain chain = planner.plan(context, ledger);
  CHECK(chain.goal == "sofa");
  REQUIRE(chain.subgoals.size() == 2);
  CHECK(chain.subgoals[0].target == "door");
  CHECK(ledger.call_count == 2);  // one per planning call, not per stage
  CHECK(ledger.l_tok == 45);      // three backend queries so far
  CHECK(ledger.l_time == 1.5);

  REQUIRE(backend->requests.size() == 3);
  CHECK(backend->requests[0].stage == PromptStage::goal);
  CHECK(backend->requests[1].stage == PromptStage::policy);
  CHECK(backend->requests[2].stage == PromptStage::chain);
}

TEST_CASE("parse failures retry with a format reminder, then give up") {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{
      "GOAL: sofa",
      "gibberish",
      "more gibberish",
      "DECISION: door | approach",
      kChainReply,
  });
  PlannerOptions options;
  options.parse_retries = 2;
  SlowPlanner planner(backend, options);
  CostLedger ledger;
  PlanContext context = context_for("find the sofa");
  planner.extract_goal(context, ledger);
  SubgoalChain chain = planner.plan(context, ledger);
  CHECK(chain.subgoals.size() == 2);

  // Policy attempts 0..2; the retries carry the appended reminder.
  REQUIRE(backend->requests.size() == 5);
  CHECK(backend->requests[1].attempt == 0);
  CHECK(backend->requests[2].attempt == 1);
  CHECK(backend->requests[3].attempt == 2);
  CHECK(backend->requests[2].user != backend->requests[1].user);
  CHECK(backend->requests[2].user == backend->requests[3].user);
  const std::string reminder = format_reminder(PromptStage::policy);
  CHECK(backend->requests[2].user.find(reminder) != std::string::npos);
  // Every attempt is paid for.
  CHECK(ledger.l_tok == 5 * 15);
}

TEST_CASE("exhausted retries raise the stage's parse failure") {
  auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{
      "GOAL: sofa", "junk", "junk", "junk"});
  PlannerOptions options;
  options.parse_retries = 2;
  SlowPlanner planner(backend, options);
  CostLedger ledger;
  PlanContext context = context_for("find the sofa");
  planner.extract_goal(context, ledger);
  CHECK(nav_error_code([&] { planner.plan(context, ledger); }) ==
        ErrorCode::policy_parse_failure);
  CHECK(backend->requests.size() == 4);  // goal + three policy attempts
  CHECK(ledger.l_tok == 4 * 15);         // failed attempts still cost tokens

  auto strict = std::make_shared<ScriptedBackend>(
      std::vector<std::string>{"GOAL: sofa", "junk"});
  PlannerOptions no_retries;
  no_retries.parse_retries = 0;
  SlowPlanner one_shot(strict, no_retries);
  CostLedger ledger2;
  one_shot.extract_goal(context, ledger2);
  CHECK(nav_error_code([&] { one_shot.plan(context, ledger2); }) ==
        ErrorCode::policy_parse_failure);
  CHECK(strict->requests.size() == 2);

  auto bad_goal = std::make_shared<ScriptedBackend>(
      std::vector<std::string>{"junk", "junk", "junk"});
  SlowPlanner goalless(bad_goal, options);
  CostLedger ledger3;
  CHECK(nav_error_code([&] { goalless.extract_goal(context, ledger3); }) ==
        ErrorCode::goal_parse_failure);
}

TEST_CASE("an empty instruction is a goal parse failure before any query") {
  auto backend =
      std::make_shared<ScriptedBackend>(std::vector<std::string>{"GOAL: x"});
  SlowPlanner planner(backend, PlannerOptions{});
  CostLedger ledger;
  PlanContext context = context_for("");
  CHECK(nav_error_code([&] { planner.extract_goal(context, ledger); }) ==
        ErrorCode::goal_parse_failure);
  CHECK(backend->requests.empty());
}

TEST_CASE("planning without a goal is rejected") {
  auto backend =
      std::make_shared<ScriptedBackend>(std::vector<std::string>{});
  SlowPlanner planner(backend, PlannerOptions{});
  CostLedger ledger;
  PlanContext context = context_for("anything");
  CHECK(nav_error_code([&] { planner.plan(context, ledger); }) ==
        ErrorCode::backend_error);
  CHECK(nav_error_code([] {
          SlowPlanner(nullptr, PlannerOptions{});
        }) == ErrorCode::config_error);
}

namespace {

// Corridor with an annotated three-landmark route for the oracle.
struct OracleRig {
  Scene scene;
  EpisodeSuite suite;

  OracleRig() {
    scene = corridor(4, 2.0);
    scene.objects = {
        {"door", {2.0, 0.5, 0.0}},
        {"hallway", {4.0, 0.5, 0.0}},
        {"sofa", {6.0, 0.5, 0.0}},
    };
    Route route;
    route.id = "r1";
    route.steps = {
        {"door", Skill::through, {"door", "hallway"}},
        {"hallway", Skill::approach, {"door", "hallway", "sofa"}},
        {"sofa", Skill::approach, {"hallway", "sofa"}},
    };
    scene.routes.push_back(route);
    scene.validate_and_index();

    Episode ep;
    ep.id = "ep1";
    ep.instruction = "go through the door, down the hallway, to the sofa";
    ep.start_viewpoint = "vp0";
    ep.goal_object = "sofa";
    ep.goal_position = {6.0, 0.5, 0.0};
    ep.route_id = "r1";
    suite.scene_name = scene.name;
    suite.episodes.push_back(ep);
  }
};

}  // namespace

TEST_CASE("oracle answers from the route annotations") {
  OracleRig rig;
  auto backend =
      std::make_shared<OraclePlannerBackend>(rig.scene, rig.suite);
  SlowPlanner planner(backend, PlannerOptions{});
  CostLedger ledger;

  PlanContext context;
  context.episode_id = "ep1";
  context.instruction = rig.suite.episodes[0].instruction;

  CHECK(planner.extract_goal(context, ledger) == "sofa");

  SubgoalChain first = planner.plan(context, ledger);
  REQUIRE(first.subgoals.size() == 3);
  CHECK(first.subgoals[0].target == "door");
  CHECK(first.subgoals[0].skill == Skill::through);
  CHECK(first.subgoals[1].target == "hallway");
  CHECK(first.subgoals[2].target == "sofa");
  CHECK(first.subgoals[0].imagined_objects ==
        std::vector<std::string>{"door", "hallway"});

  context.executed_history = {"door"};
  SubgoalChain second = planner.plan(context, ledger);
  REQUIRE(second.subgoals.size() == 2);
  CHECK(second.subgoals[0].target == "hallway");
  CHECK(second.subgoals[0].skill == Skill::approach);

  // Labels that do not match the pending step are ignored.
  context.executed_history = {"plant"};
  SubgoalChain unmatched = planner.plan(context, ledger);
  CHECK(unmatched.subgoals.size() == 3);
  CHECK(unmatched.subgoals[0].target == "door");

  // Exhausted route: head straight for the goal.
  context.executed_history = {"door", "hallway", "sofa"};
  SubgoalChain done = planner.plan(context, ledger);
  REQUIRE(done.subgoals.size() == 1);
  CHECK(done.subgoals[0].target == "sofa");
  CHECK(done.subgoals[0].skill == Skill::approach);
}

TEST_CASE("oracle chains are clamped to the planning horizon") {
  OracleRig rig;
  auto backend =
      std::make_shared<OraclePlannerBackend>(rig.scene, rig.suite);
  PlannerOptions options;
  options.max_subgoals = 2;
  SlowPlanner planner(backend, options);
  CostLedger ledger;
  PlanContext context;
  context.episode_id = "ep1";
  context.instruction = "x";
  planner.extract_goal(context, ledger);
  CHECK(planner.plan(context, ledger).subgoals.size() == 2);
}

TEST_CASE("oracle rejects episodes it has no script for") {
  OracleRig rig;
  OraclePlannerBackend backend(rig.scene, rig.suite);
  PromptRequest request;
  request.stage = PromptStage::goal;
  request.episode_id = "nope";
  CHECK(nav_error_code([&] { backend.respond(request); }) ==
        ErrorCode::backend_error);
}

TEST_CASE("oracle synthesizes usage from the configured rates") {
  OracleRig rig;
  OraclePlannerBackend base(rig.scene, rig.suite);  // default rates are zero
  PromptRequest request;
  request.stage = PromptStage::goal;
  request.episode_id = "ep1";
  request.system = "SY";
  request.user = "USER";
  BackendReply free_reply = base.respond(request);
  CHECK(free_reply.usage.total() == 0);
  CHECK(free_reply.duration_s == 0.0);

  OraclePlannerBackend paid(rig.scene, rig.suite, OracleCosts{1.0, 1.0, 0.5});
  BackendReply reply = paid.respond(request);
  CHECK(reply.text == "GOAL: sofa\n");
  CHECK(reply.usage.prompt_tokens == 6);       // |"SY"| + |"USER"|
  CHECK(reply.usage.completion_tokens == 11);  // |"GOAL: sofa\n"|
  CHECK(reply.duration_s == 0.5 * 17);

  OraclePlannerBackend frac(rig.scene, rig.suite, OracleCosts{0.25, 0.25, 0.0});
  BackendReply rounded = frac.respond(request);
  CHECK(rounded.usage.prompt_tokens == 2);      // ceil(6 * 0.25)
  CHECK(rounded.usage.completion_tokens == 3);  // ceil(11 * 0.25)
}

TEST_CASE("request hashes ignore the attempt number but not the text") {
  PromptRequest a;
  a.stage = PromptStage::policy;
  a.episode_id = "ep";
  a.system = "sys";
  a.user = "user";
  PromptRequest b = a;
  CHECK(request_hash(a) == request_hash(b));
  b.attempt = 2;
  CHECK(request_hash(a) == request_hash(b));
  b.user = "user!";
  CHECK(request_hash(a) != request_hash(b));
  PromptRequest c = a;
  c.stage = PromptStage::chain;
  CHECK(request_hash(a) != request_hash(c));
  PromptRequest d = a;
  d.episode_id = "other";
  CHECK(request_hash(a) != request_hash(d));
}

TEST_CASE("fixture files round-trip every field") {
  auto dir = fresh_dir("fixtures_roundtrip");
  std::vector<FixtureRecord> records(2);
  records[0].key = 12345;
  records[0].stage = PromptStage::policy;
  records[0].episode_id = "ep1";
  records[0].reply_text = "DECISION: door | through\n";
  records[0].usage.prompt_tokens = 812;
  records[0].usage.completion_tokens = 143;
  records[0].duration_s = 1.25;
  records[1].key = 67890;
  records[1].stage = PromptStage::chain;
  records[1].episode_id = "ep2";
  records[1].reply_text = "CHAIN: []";

  std::string path = (dir / "fx.json").string();
  save_fixtures(records, path);
  std::vector<FixtureRecord> loaded = load_fixtures(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].key == 12345);
  CHECK(loaded[0].stage == PromptStage::policy);
  CHECK(loaded[0].episode_id == "ep1");
  CHECK(loaded[0].reply_text == "DECISION: door | through\n");
  CHECK(loaded[0].usage.prompt_tokens == 812);
  CHECK(loaded[0].usage.completion_tokens == 143);
  CHECK(loaded[0].duration_s == 1.25);
  CHECK(loaded[1].key == 67890);

  write_text_file((dir / "bad.json").string(), "not json");
  CHECK(nav_error_code([&] { load_fixtures((dir / "bad.json").string()); }) ==
        ErrorCode::io_error);
  write_text_file((dir / "short.json").string(),
                  "{\"records\": [{\"key\": 1}]}");
  CHECK(nav_error_code(
            [&] { load_fixtures((dir / "short.json").string()); }) ==
        ErrorCode::io_error);
}

TEST_CASE("recording wrapper captures replies without changing them") {
  auto inner = std::make_shared<ScriptedBackend>(
      std::vector<std::string>{"GOAL: sofa"});
  RecordingBackend recorder(inner);
  PromptRequest request;
  request.stage = PromptStage::goal;
  request.episode_id = "ep";
  request.system = "s";
  request.user = "u";
  BackendReply reply = recorder.respond(request);
  CHECK(reply.text == "GOAL: sofa");
  REQUIRE(recorder.records().size() == 1);
  const FixtureRecord& rec = recorder.records()[0];
  CHECK(rec.key == request_hash(request));
  CHECK(rec.stage == PromptStage::goal);
  CHECK(rec.episode_id == "ep");
  CHECK(rec.reply_text == "GOAL: sofa");
  CHECK(rec.usage.prompt_tokens == 10);
  CHECK(nav_error_code([] { RecordingBackend(nullptr); }) ==
        ErrorCode::config_error);
}

TEST_CASE("replay serves identical requests in recorded order") {
  PromptRequest request;
  request.stage = PromptStage::policy;
  request.episode_id = "ep";
  request.system = "s";
  request.user = "u";
  const std::uint64_t key = request_hash(request);

  std::vector<FixtureRecord> records(2);
  records[0].key = key;
  records[0].reply_text = "first";
  records[1].key = key;
  records[1].reply_text = "second";

  ReplayBackend replay(records);
  CHECK(replay.respond(request).text == "first");
  CHECK(replay.respond(request).text == "second");
  CHECK(nav_error_code([&] { replay.respond(request); }) ==
        ErrorCode::replay_miss);

  PromptRequest other = request;
  other.user = "different";
  ReplayBackend replay2(records);
  CHECK(nav_error_code([&] { replay2.respond(other); }) ==
        ErrorCode::replay_miss);
}

TEST_CASE("an episode replayed from its recording repeats the ledger") {
  OracleRig rig;
  RunConfig config;
  config.tau = 0.8;

  auto inner = std::make_shared<OraclePlannerBackend>(
      rig.scene, rig.suite, OracleCosts{0.1, 0.2, 0.01});
  auto recorder = std::make_shared<RecordingBackend>(inner);
  SlowPlanner recording_planner(recorder, config.planner);
  EpisodeResult live =
      run_episode(rig.scene, rig.suite.episodes[0], recording_planner, config);
  REQUIRE(live.error.empty());
  CHECK(live.cost.l_tok > 0);

  auto replay = std::make_shared<ReplayBackend>(recorder->records());
  SlowPlanner replay_planner(replay, config.planner);
  EpisodeResult replayed =
      run_episode(rig.scene, rig.suite.episodes[0], replay_planner, config);

  CHECK(replayed.cost.l_tok == live.cost.l_tok);
  CHECK(replayed.cost.l_time == live.cost.l_time);
  CHECK(replayed.cost.call_count == live.cost.call_count);
  CHECK(results_to_csv({replayed}) == results_to_csv({live}));
  CHECK(traces_to_csv({replayed}) == traces_to_csv({live}));
}

TEST_CASE("live endpoint configuration is validated up front") {
  LlmConfig config;
  config.model = "m";
  CHECK(nav_error_code([&] { LlmBackend{config}; }) ==
        ErrorCode::config_error);  // no base_url

  config.base_url = "http://127.0.0.1:1";
  config.model = "";
  CHECK(nav_error_code([&] { LlmBackend{config}; }) ==
        ErrorCode::config_error);  // no model

  config.model = "m";
  config.api_key_env = "";
  CHECK(nav_error_code([&] { LlmBackend{config}; }) ==
        ErrorCode::config_error);  // no env var name

  config.api_key_env = "SFNAV_TEST_KEY_UNSET";
  ::unsetenv("SFNAV_TEST_KEY_UNSET");
  CHECK(nav_error_code([&] { LlmBackend{config}; }) ==
        ErrorCode::config_error);  // credential absent

  // With the credential present the constructor succeeds; the dead endpoint
  // only fails at request time.
  ::setenv("SFNAV_TEST_KEY_UNSET", "secret", 1);
  config.timeout_s = 1;
  LlmBackend backend(config);
  CHECK(std::string(backend.kind()) == "llm");
  PromptRequest request;
  request.stage = PromptStage::goal;
  CHECK(nav_error_code([&] { backend.respond(request); }) ==
        ErrorCode::backend_error);
  ::unsetenv("SFNAV_TEST_KEY_UNSET");
}
