#include "sfnav/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <json.hpp>

#include "sfnav/report.hpp"
#include "sfnav/scene_io.hpp"

namespace sfnav {

namespace {

bool flag_set(const std::vector<std::string>& explicit_flags,
              const std::string& name) {
  return std::find(explicit_flags.begin(), explicit_flags.end(), name) !=
         explicit_flags.end();
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

// The replay factory hands every episode the full record set; cursors are
// per-backend, so per-episode instances keep parallel-safe determinism.
BackendFactory make_factory(const CliRunOptions& options, const Scene& scene,
                            const EpisodeSuite& suite,
                            std::vector<FixtureRecord>* replay_records) {
  if (options.backend == "oracle") {
    const OracleCosts costs = options.oracle;
    return [&scene, &suite, costs](const Episode&) {
      return std::make_shared<OraclePlannerBackend>(scene, suite, costs);
    };
  }
  if (options.backend == "llm") {
    LlmConfig llm = options.llm;
    return [llm](const Episode&) { return std::make_shared<LlmBackend>(llm); };
  }
  if (options.backend == "replay") {
    if (!replay_records)
      throw NavError(ErrorCode::config_error,
                     "replay backend is not valid for this command");
    if (options.fixtures_path.empty())
      throw NavError(ErrorCode::config_error,
                     "replay backend needs --fixtures");
    *replay_records = load_fixtures(options.fixtures_path);
    const std::vector<FixtureRecord>* records = replay_records;
    return [records](const Episode&) {
      return std::make_shared<ReplayBackend>(*records);
    };
  }
  throw NavError(ErrorCode::config_error,
                 "unknown backend \"" + options.backend +
                     "\" (expected oracle|llm|replay)");
}

struct LoadedSuite {
  Scene scene;
  EpisodeSuite suite;
};

LoadedSuite load_inputs(const CliRunOptions& options) {
  if (options.scene_path.empty())
    throw NavError(ErrorCode::config_error, "missing --scene");
  if (options.episodes_path.empty())
    throw NavError(ErrorCode::config_error, "missing --episodes");
  LoadedSuite loaded;
  loaded.scene = load_scene(options.scene_path);
  loaded.suite = load_episodes(options.episodes_path);
  if (loaded.suite.scene_name != loaded.scene.name)
    std::cerr << "warning: episode suite targets scene \""
              << loaded.suite.scene_name << "\" but \"" << loaded.scene.name
              << "\" was loaded\n";
  for (const Episode& ep : loaded.suite.episodes)
    validate_episode(loaded.scene, ep);
  return loaded;
}

void print_aggregate(const AggregateMetrics& m) {
  std::printf(
      "episodes=%d failures=%d sr=%.4f osr=%.4f spl=%.4f ne=%.3f tl=%.3f\n",
      m.episodes, m.failures, m.sr, m.osr, m.spl, m.ne, m.tl);
  std::printf(
      "l_tok=%.1f v_tok=%.1f u_tok=%.1f l_time=%.3f v_time=%.3f t_time=%.3f "
      "calls=%d\n",
      m.l_tok, m.v_tok, m.u_tok, m.l_time, m.v_time, m.t_time, m.call_count);
}

int run_and_report(const CliRunOptions& options, bool record_fixtures) {
  if (options.report_format != "json" && options.report_format != "csv")
    throw NavError(ErrorCode::config_error,
                   "unknown report format \"" + options.report_format +
                       "\" (expected json|csv)");
  LoadedSuite loaded = load_inputs(options);

  std::vector<FixtureRecord> replay_records;
  BackendFactory factory =
      make_factory(options, loaded.scene, loaded.suite, &replay_records);

  std::vector<std::shared_ptr<RecordingBackend>> recorders;
  if (record_fixtures) {
    if (options.fixtures_path.empty())
      throw NavError(ErrorCode::config_error,
                     "recording needs --fixtures for the output path");
    BackendFactory inner = std::move(factory);
    factory = [inner, &recorders](const Episode& episode) {
      auto recorder = std::make_shared<RecordingBackend>(inner(episode));
      recorders.push_back(recorder);
      return recorder;
    };
  }

  std::vector<EpisodeResult> results =
      run_batch(loaded.scene, loaded.suite, factory, options.run, options.jobs);
  AggregateMetrics metrics = compute_metrics(results, options.run.lambda);

  std::filesystem::create_directories(options.out_dir);
  const std::string report_path = options.report_path.empty()
                                      ? join_path(options.out_dir, "report.json")
                                      : options.report_path;
  write_text_file(report_path, results_to_json(results, metrics, options.run));
  if (options.report_format == "csv") {
    write_text_file(join_path(options.out_dir, "episodes.csv"),
                    results_to_csv(results));
    write_text_file(join_path(options.out_dir, "aggregate.csv"),
                    aggregate_to_csv(metrics));
  }
  if (options.write_traces || !options.trace_path.empty()) {
    const std::string trace_path = options.trace_path.empty()
                                       ? join_path(options.out_dir, "traces.csv")
                                       : options.trace_path;
    write_text_file(trace_path, traces_to_csv(results));
  }
  if (record_fixtures) {
    std::vector<FixtureRecord> all;
    for (const auto& r : recorders) {
      all.insert(all.end(), r->records().begin(), r->records().end());
    }
    save_fixtures(all, options.fixtures_path);
    std::printf("recorded %zu fixture replies to %s\n", all.size(),
                options.fixtures_path.c_str());
  }

  for (const EpisodeResult& r : results) {
    if (!r.error.empty())
      std::fprintf(stderr, "episode %s failed: %s\n", r.episode_id.c_str(),
                   r.error.c_str());
    for (const std::string& w : r.warnings)
      std::fprintf(stderr, "episode %s: %s\n", r.episode_id.c_str(), w.c_str());
  }
  print_aggregate(metrics);
  // Failed episodes are data, not an infrastructure fault.
  return 0;
}

}  // namespace

void apply_config_file(CliRunOptions& options, const std::string& path,
                       const std::vector<std::string>& explicit_flags) {
  nlohmann::json root =
      nlohmann::json::parse(read_text_file(path), nullptr, false);
  if (root.is_discarded() || !root.is_object())
    throw NavError(ErrorCode::config_error,
                   "config file is not a JSON object: " + path);

  auto fail = [&](const std::string& what) {
    throw NavError(ErrorCode::config_error, path + ": " + what);
  };

  for (auto it = root.begin(); it != root.end(); ++it) {
    const std::string& key = it.key();
    const nlohmann::json& value = it.value();
    if (flag_set(explicit_flags, key)) continue;  // flags beat file values
    try {
      if (key == "scene") {
        options.scene_path = value.get<std::string>();
      } else if (key == "episodes") {
        options.episodes_path = value.get<std::string>();
      } else if (key == "planner") {
        options.backend = value.get<std::string>();
      } else if (key == "fixtures") {
        options.fixtures_path = value.get<std::string>();
      } else if (key == "out_dir") {
        options.out_dir = value.get<std::string>();
      } else if (key == "report") {
        options.report_path = value.get<std::string>();
      } else if (key == "trace") {
        options.trace_path = value.get<std::string>();
      } else if (key == "report_format") {
        options.report_format = value.get<std::string>();
      } else if (key == "jobs") {
        options.jobs = value.get<int>();
      } else if (key == "oracle_tokens_per_char") {
        const double rate = value.get<double>();
        options.oracle.prompt_tokens_per_char = rate;
        options.oracle.completion_tokens_per_char = rate;
      } else if (key == "oracle_seconds_per_token") {
        options.oracle.seconds_per_token = value.get<double>();
      } else if (key == "record") {
        options.record = value.get<bool>();
      } else if (key == "write_traces") {
        options.write_traces = value.get<bool>();
      } else if (key == "tau") {
        options.run.tau = value.get<double>();
      } else if (key == "d_stop") {
        options.run.d_stop = value.get<double>();
      } else if (key == "d_sub") {
        options.run.d_sub = value.get<double>();
      } else if (key == "r_sense") {
        options.run.r_sense = value.get<double>();
      } else if (key == "t_max") {
        options.run.t_max = value.get<int>();
      } else if (key == "horizon") {
        options.run.horizon = value.get<int>();
      } else if (key == "lambda") {
        options.run.lambda = value.get<double>();
      } else if (key == "seed") {
        options.run.seed = value.get<std::uint64_t>();
      } else if (key == "v_tok_per_step") {
        options.run.v_tok_per_step = value.get<long long>();
      } else if (key == "v_time_per_step") {
        options.run.v_time_per_step = value.get<double>();
      } else if (key == "always_replan") {
        options.run.always_replan = value.get<bool>();
      } else if (key == "nm_mode") {
        options.run.bridge.nm_mode = parse_nm_mode(value.get<std::string>());
      } else if (key == "bound_form") {
        options.run.bridge.bound_form =
            parse_bound_form(value.get<std::string>());
      } else if (key == "window") {
        options.run.bridge.window = value.get<int>();
      } else if (key == "parse_retries") {
        options.run.planner.parse_retries = value.get<int>();
      } else if (key == "taus") {
        options.taus = value.get<std::vector<double>>();
      } else if (key == "llm_base_url") {
        options.llm.base_url = value.get<std::string>();
      } else if (key == "llm_model") {
        options.llm.model = value.get<std::string>();
      } else if (key == "llm_api_key_env") {
        options.llm.api_key_env = value.get<std::string>();
      } else if (key == "llm_temperature") {
        options.llm.temperature = value.get<double>();
      } else if (key == "llm_max_tokens") {
        options.llm.max_tokens = value.get<int>();
      } else if (key == "llm_timeout_s") {
        options.llm.timeout_s = value.get<int>();
      } else if (key == "llm_api_key" || key == "api_key") {
        fail("credentials are not accepted in config files; set the "
             "environment variable named by llm_api_key_env instead");
      } else {
        fail("unknown config key \"" + key + "\"");
      }
    } catch (const nlohmann::json::exception& e) {
      fail("bad value for \"" + key + "\": " + e.what());
    }
  }
}

int cmd_run(const CliRunOptions& options) {
  return run_and_report(options, /*record_fixtures=*/options.record);
}

int cmd_record_fixtures(const CliRunOptions& options) {
  if (options.backend == "replay")
    throw NavError(ErrorCode::config_error,
                   "recording from the replay backend is circular; use "
                   "oracle or llm");
  return run_and_report(options, /*record_fixtures=*/true);
}

int cmd_sweep(const CliRunOptions& options) {
  LoadedSuite loaded = load_inputs(options);
  std::vector<FixtureRecord> replay_records;
  BackendFactory factory =
      make_factory(options, loaded.scene, loaded.suite, &replay_records);

  std::vector<std::string> warnings;
  std::vector<SweepRow> rows = sweep_tau(loaded.scene, loaded.suite, factory,
                                         options.run, options.taus, &warnings);
  for (const std::string& w : warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());

  std::filesystem::create_directories(options.out_dir);
  write_text_file(join_path(options.out_dir, "sweep.json"),
                  sweep_to_json(rows, options.run));
  write_text_file(join_path(options.out_dir, "sweep.csv"), sweep_to_csv(rows));

  for (const SweepRow& row : rows) {
    std::printf("tau=%.2f sr=%.4f osr=%.4f spl=%.4f u_tok=%.1f t_time=%.3f "
                "calls=%d\n",
                row.tau, row.metrics.sr, row.metrics.osr, row.metrics.spl,
                row.metrics.u_tok, row.metrics.t_time,
                row.metrics.call_count);
  }
  return 0;
}

int cmd_gen_scenes(const CliGenOptions& options) {
  if (options.count < 0)
    throw NavError(ErrorCode::config_error, "count must be nonnegative");
  if (options.count == 0) {
    std::fprintf(stderr, "warning: count is 0, nothing generated\n");
    return 0;
  }
  std::filesystem::create_directories(options.out_dir);
  for (int i = 0; i < options.count; ++i) {
    GenParams params = options.params;
    params.seed = options.params.seed + static_cast<std::uint64_t>(i);
    GeneratedScene gen = generate_scene(params);
    const std::string stem =
        options.prefix + "_" + std::to_string(params.seed);
    const std::string scene_path = join_path(options.out_dir, stem + ".json");
    const std::string episodes_path =
        join_path(options.out_dir, stem + "_episodes.json");
    save_scene(gen.scene, scene_path);
    save_episodes(gen.suite, episodes_path);
    std::printf("%s\n%s\n", scene_path.c_str(), episodes_path.c_str());
  }
  return 0;
}

}  // namespace sfnav
