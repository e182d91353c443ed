#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "sfnav/cli.hpp"
#include "sfnav/report.hpp"
#include "sfnav/scene_gen.hpp"
#include "sfnav/scene_io.hpp"
#include "test_support.hpp"

using namespace sfnav;
using sfnav_test::fresh_dir;
using sfnav_test::nav_error_code;

namespace {

std::string slurp(const std::filesystem::path& path) {
  return read_text_file(path.string());
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

// Generated scene plus saved input files, ready for the command entry points.
struct CliRig {
  std::filesystem::path dir;
  GeneratedScene gen;
  CliRunOptions options;

  explicit CliRig(const std::string& name, std::uint64_t seed = 7) {
    dir = fresh_dir(name);
    GenParams params;
    params.seed = seed;
    params.grid_w = 3;
    params.grid_h = 3;
    params.objects_per_scene = 6;
    params.episodes_per_scene = 2;
    gen = generate_scene(params);
    save_scene(gen.scene, (dir / "scene.json").string());
    save_episodes(gen.suite, (dir / "episodes.json").string());

    options.scene_path = (dir / "scene.json").string();
    options.episodes_path = (dir / "episodes.json").string();
    options.out_dir = (dir / "out").string();
    options.oracle = {0.25, 0.25, 0.01};
  }
};

}  // namespace

TEST_CASE("config files fill options but explicit flags win") {
  auto dir = fresh_dir("cli_config");
  const std::string path = (dir / "config.json").string();
  write_text_file(path,
                  "{\"tau\": 0.25, \"jobs\": 4, \"report_format\": \"csv\","
                  " \"taus\": [0.9, 0.5], \"nm_mode\": \"timesteps\","
                  " \"window\": 6, \"oracle_tokens_per_char\": 0.5}\n");

  CliRunOptions options;
  options.run.tau = 0.9;  // as if --tau 0.9 was given
  apply_config_file(options, path, {"tau"});
  CHECK(options.run.tau == 0.9);
  CHECK(options.jobs == 4);
  CHECK(options.report_format == "csv");
  CHECK(options.taus == std::vector<double>{0.9, 0.5});
  CHECK(options.run.bridge.nm_mode == NmMode::timesteps);
  CHECK(options.run.bridge.window == 6);
  CHECK(options.oracle.prompt_tokens_per_char == 0.5);
  CHECK(options.oracle.completion_tokens_per_char == 0.5);

  CliRunOptions from_file;
  apply_config_file(from_file, path, {});
  CHECK(from_file.run.tau == 0.25);
}

TEST_CASE("config files reject unknown keys, bad values, and credentials") {
  auto dir = fresh_dir("cli_config_bad");
  auto with_text = [&](const std::string& name, const std::string& text) {
    const std::string path = (dir / name).string();
    write_text_file(path, text);
    CliRunOptions options;
    return nav_error_code([&] { apply_config_file(options, path, {}); });
  };
  CHECK(with_text("unknown.json", "{\"速度\": 1}") == ErrorCode::config_error);
  CHECK(with_text("typo.json", "{\"tau_stop\": 0.5}") ==
        ErrorCode::config_error);
  CHECK(with_text("badval.json", "{\"jobs\": \"many\"}") ==
        ErrorCode::config_error);
  CHECK(with_text("badmode.json", "{\"nm_mode\": \"bogus\"}") ==
        ErrorCode::config_error);
  CHECK(with_text("array.json", "[1, 2]") == ErrorCode::config_error);
  CHECK(with_text("mangled.json", "{{{") == ErrorCode::config_error);
  CHECK(with_text("key1.json", "{\"llm_api_key\": \"sk-123\"}") ==
        ErrorCode::config_error);
  CHECK(with_text("key2.json", "{\"api_key\": \"sk-123\"}") ==
        ErrorCode::config_error);

  CliRunOptions options;
  CHECK(nav_error_code([&] {
          apply_config_file(options, (dir / "missing.json").string(), {});
        }) == ErrorCode::io_error);
}

TEST_CASE("a run writes a parseable report with per-episode rows") {
  CliRig rig("cli_run");
  rig.options.write_traces = true;
  REQUIRE(cmd_run(rig.options) == 0);

  const auto out = std::filesystem::path(rig.options.out_dir);
  nlohmann::json report = nlohmann::json::parse(slurp(out / "report.json"));
  REQUIRE(report.contains("episodes"));
  REQUIRE(report["episodes"].size() == rig.gen.suite.episodes.size());
  CHECK(report["schema_version"].get<int>() == 1);
  CHECK(report["config"]["tau"].get<double>() == rig.options.run.tau);
  CHECK(report["config"]["horizon"].get<int>() == rig.options.run.horizon);
  CHECK(report["aggregate"]["episodes"].get<int>() ==
        static_cast<int>(rig.gen.suite.episodes.size()));

  // Cost identities survive the serialization round trip.
  const double lambda = report["config"]["lambda"].get<double>();
  long long total_steps = 0;
  for (const auto& ep : report["episodes"]) {
    const auto& cost = ep["cost"];
    CHECK(ep["u_tok"].get<double>() ==
          cost["l_tok"].get<double>() + lambda * cost["v_tok"].get<double>());
    CHECK(ep["t_time"].get<double>() ==
          doctest::Approx(cost["l_time"].get<double>() +
                          cost["v_time"].get<double>())
              .epsilon(1e-12));
    CHECK(ep["error"].get<std::string>().empty());
    total_steps += ep["steps"].get<long long>();
  }

  const std::string traces = slurp(out / "traces.csv");
  CHECK(line_count(traces) == static_cast<std::size_t>(total_steps) + 1);
  CHECK(traces.rfind("episode_id,t,viewpoint,confidence,degenerate,", 0) == 0);
}

TEST_CASE("csv format adds episode and aggregate tables") {
  CliRig rig("cli_csv");
  rig.options.report_format = "csv";
  REQUIRE(cmd_run(rig.options) == 0);

  const auto out = std::filesystem::path(rig.options.out_dir);
  const std::string episodes = slurp(out / "episodes.csv");
  CHECK(episodes.rfind("episode_id,success,oracle_success,ne,tl,shortest,"
                       "spl_term,steps,l_tok,v_tok,u_tok,l_time,v_time,"
                       "t_time,call_count,error\n",
                       0) == 0);
  CHECK(line_count(episodes) == rig.gen.suite.episodes.size() + 1);

  const std::string aggregate = slurp(out / "aggregate.csv");
  CHECK(aggregate.rfind(
            "sr,osr,spl,ne,tl,l_tok,v_tok,u_tok,l_time,v_time,t_time\n", 0) ==
        0);
  CHECK(line_count(aggregate) == 2);
}

TEST_CASE("identical runs produce byte-identical outputs") {
  CliRig rig("cli_repeat");
  rig.options.write_traces = true;

  CliRunOptions first = rig.options;
  first.out_dir = (rig.dir / "out_a").string();
  CliRunOptions second = rig.options;
  second.out_dir = (rig.dir / "out_b").string();
  REQUIRE(cmd_run(first) == 0);
  REQUIRE(cmd_run(second) == 0);

  auto a = std::filesystem::path(first.out_dir);
  auto b = std::filesystem::path(second.out_dir);
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  CHECK(slurp(a / "traces.csv") == slurp(b / "traces.csv"));
}

TEST_CASE("run options are validated before any episode starts") {
  CliRig rig("cli_badopts");

  CliRunOptions bad_tau = rig.options;
  bad_tau.run.tau = 1.2;
  CHECK(nav_error_code([&] { cmd_run(bad_tau); }) == ErrorCode::config_error);

  CliRunOptions no_scene = rig.options;
  no_scene.scene_path.clear();
  CHECK(nav_error_code([&] { cmd_run(no_scene); }) == ErrorCode::config_error);

  CliRunOptions no_episodes = rig.options;
  no_episodes.episodes_path.clear();
  CHECK(nav_error_code([&] { cmd_run(no_episodes); }) ==
        ErrorCode::config_error);

  CliRunOptions bad_backend = rig.options;
  bad_backend.backend = "quantum";
  CHECK(nav_error_code([&] { cmd_run(bad_backend); }) ==
        ErrorCode::config_error);

  CliRunOptions bad_format = rig.options;
  bad_format.report_format = "xml";
  CHECK(nav_error_code([&] { cmd_run(bad_format); }) ==
        ErrorCode::config_error);

  CliRunOptions replay_no_fixtures = rig.options;
  replay_no_fixtures.backend = "replay";
  CHECK(nav_error_code([&] { cmd_run(replay_no_fixtures); }) ==
        ErrorCode::config_error);

  CliRunOptions record_no_fixtures = rig.options;
  record_no_fixtures.record = true;
  CHECK(nav_error_code([&] { cmd_run(record_no_fixtures); }) ==
        ErrorCode::config_error);

  CliRunOptions gone = rig.options;
  gone.episodes_path = (rig.dir / "nope.json").string();
  CHECK(nav_error_code([&] { cmd_run(gone); }) == ErrorCode::io_error);
}

TEST_CASE("recorded fixtures replay to identical metrics") {
  CliRig rig("cli_record");
  rig.options.report_format = "csv";
  rig.options.fixtures_path = (rig.dir / "fixtures.json").string();

  CliRunOptions record = rig.options;
  record.out_dir = (rig.dir / "out_live").string();
  REQUIRE(cmd_record_fixtures(record) == 0);
  REQUIRE(std::filesystem::exists(rig.options.fixtures_path));

  CliRunOptions replay = rig.options;
  replay.backend = "replay";
  replay.out_dir = (rig.dir / "out_replay").string();
  REQUIRE(cmd_run(replay) == 0);

  auto live = std::filesystem::path(record.out_dir);
  auto back = std::filesystem::path(replay.out_dir);
  CHECK(slurp(live / "episodes.csv") == slurp(back / "episodes.csv"));
  CHECK(slurp(live / "aggregate.csv") == slurp(back / "aggregate.csv"));

  CliRunOptions circular = rig.options;
  circular.backend = "replay";
  CHECK(nav_error_code([&] { cmd_record_fixtures(circular); }) ==
        ErrorCode::config_error);
}

TEST_CASE("sweeps write one row per distinct threshold") {
  CliRig rig("cli_sweep");
  rig.options.taus = {1.0, 0.5};
  REQUIRE(cmd_sweep(rig.options) == 0);

  const auto out = std::filesystem::path(rig.options.out_dir);
  nlohmann::json sweep = nlohmann::json::parse(slurp(out / "sweep.json"));
  REQUIRE(sweep.contains("rows"));
  CHECK(sweep["rows"].size() == 2);
  CHECK(sweep["rows"][0]["tau"].get<double>() == 1.0);
  CHECK(sweep["rows"][1]["tau"].get<double>() == 0.5);

  const std::string csv = slurp(out / "sweep.csv");
  CHECK(csv.rfind("tau,episodes,sr,osr,spl,ne,tl,l_tok,v_tok,u_tok,l_time,"
                  "v_time,t_time,call_count\n",
                  0) == 0);
  CHECK(line_count(csv) == 3);
}

TEST_CASE("scene generation emits loadable scene and episode files") {
  auto dir = fresh_dir("cli_gen");
  CliGenOptions gen;
  gen.params.seed = 11;
  gen.params.grid_w = 3;
  gen.params.grid_h = 2;
  gen.params.objects_per_scene = 4;
  gen.count = 2;
  gen.out_dir = dir.string();
  gen.prefix = "sc";
  REQUIRE(cmd_gen_scenes(gen) == 0);

  for (std::uint64_t seed : {11u, 12u}) {
    const std::string stem = "sc_" + std::to_string(seed);
    Scene scene = load_scene((dir / (stem + ".json")).string());
    EpisodeSuite suite =
        load_episodes((dir / (stem + "_episodes.json")).string());
    CHECK(scene.viewpoints.size() == 6);
    REQUIRE_FALSE(suite.episodes.empty());
    for (const Episode& ep : suite.episodes)
      CHECK_NOTHROW(validate_episode(scene, ep));
  }

  CliGenOptions none = gen;
  none.count = 0;
  none.out_dir = (dir / "empty").string();
  REQUIRE(cmd_gen_scenes(none) == 0);
  CHECK_FALSE(std::filesystem::exists(none.out_dir));

  CliGenOptions negative = gen;
  negative.count = -1;
  CHECK(nav_error_code([&] { cmd_gen_scenes(negative); }) ==
        ErrorCode::config_error);
}

TEST_CASE("the aggregate block matches a recomputation from the rows") {
  CliRig rig("cli_roundtrip");
  REQUIRE(cmd_run(rig.options) == 0);
  nlohmann::json report = nlohmann::json::parse(
      slurp(std::filesystem::path(rig.options.out_dir) / "report.json"));

  const auto& eps = report["episodes"];
  REQUIRE_FALSE(eps.empty());
  double sr = 0.0, spl = 0.0, u_tok = 0.0;
  int calls = 0;
  for (const auto& ep : eps) {
    sr += ep["success"].get<bool>() ? 1.0 : 0.0;
    spl += ep["spl_term"].get<double>();
    u_tok += ep["u_tok"].get<double>();
    calls += ep["cost"]["call_count"].get<int>();
  }
  const double n = static_cast<double>(eps.size());
  const auto& agg = report["aggregate"];
  CHECK(agg["sr"].get<double>() == doctest::Approx(sr / n).epsilon(1e-12));
  CHECK(agg["spl"].get<double>() == doctest::Approx(spl / n).epsilon(1e-12));
  CHECK(agg["u_tok"].get<double>() ==
        doctest::Approx(u_tok / n).epsilon(1e-12));
  CHECK(agg["call_count"].get<int>() == calls);
}
