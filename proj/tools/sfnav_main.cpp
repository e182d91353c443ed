// Command-line front end: run, sweep, gen-scenes, record-fixtures.
// Precedence for run options is flags, then config file, then defaults.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sfnav/cli.hpp"
#include "sfnav/errors.hpp"

namespace {

// Holds string-typed flag values that need parsing into enums afterwards.
struct RunFlagBindings {
  std::string nm_mode;
  std::string bound_form;
  std::string config_path;
};

void add_run_flags(CLI::App* cmd, sfnav::CliRunOptions& o,
                   RunFlagBindings& b) {
  cmd->add_option("--scene", o.scene_path, "Scene JSON file");
  cmd->add_option("--episodes", o.episodes_path, "Episode suite JSON file");
  cmd->add_option("--planner", o.backend,
                  "Planner backend: oracle|llm|replay");
  cmd->add_option("--fixtures", o.fixtures_path,
                  "Fixture file (replay input or recording output)");
  cmd->add_flag("--record", o.record,
                "Record backend replies to the fixture file");
  cmd->add_option("--out-dir", o.out_dir, "Output directory for reports");
  cmd->add_option("--report", o.report_path,
                  "Report JSON path (defaults to <out-dir>/report.json)");
  cmd->add_option("--trace", o.trace_path,
                  "Per-step trace CSV path; setting it enables traces");
  cmd->add_option("--report-format", o.report_format,
                  "Report format: json|csv");
  cmd->add_flag("--write-traces", o.write_traces,
                "Also write the per-step trace CSV");
  cmd->add_option("--jobs", o.jobs, "Episodes run on this many threads");
  cmd->add_option("--tau", o.run.tau,
                  "Confidence threshold; the planner runs when C <= tau");
  cmd->add_option("--d-stop", o.run.d_stop, "Success radius around the goal");
  cmd->add_option("--d-sub", o.run.d_sub, "Subgoal completion radius");
  cmd->add_option("--r-sense", o.run.r_sense, "Perception radius");
  cmd->add_option("--t-max", o.run.t_max, "Step budget per episode");
  cmd->add_option("--horizon", o.run.horizon, "Max subgoals per plan");
  cmd->add_option("--lambda", o.run.lambda,
                  "Unified-token weight on verifier tokens");
  cmd->add_option("--seed", o.run.seed, "Run seed");
  cmd->add_option("--v-tok-per-step", o.run.v_tok_per_step,
                  "Verifier tokens charged per step");
  cmd->add_option("--v-time-per-step", o.run.v_time_per_step,
                  "Verifier seconds charged per step");
  cmd->add_flag("--always-replan", o.run.always_replan,
                "Call the planner every step regardless of confidence");
  cmd->add_option("--nm-mode", b.nm_mode,
                  "Bound scaling counts: objects|timesteps");
  cmd->add_option("--bound-form", b.bound_form,
                  "Ambiguity bound form: literal|negated_structure");
  cmd->add_option("--window", o.run.bridge.window,
                  "Recent-timestep alignment window (0 = all history)");
  cmd->add_option("--parse-retries", o.run.planner.parse_retries,
                  "Reply parse retries per planner stage");
  cmd->add_option("--llm-base-url", o.llm.base_url, "LLM endpoint base URL");
  cmd->add_option("--llm-model", o.llm.model, "LLM model identifier");
  cmd->add_option("--llm-api-key-env", o.llm.api_key_env,
                  "Environment variable holding the API key");
  cmd->add_option("--llm-temperature", o.llm.temperature,
                  "LLM sampling temperature");
  cmd->add_option("--llm-max-tokens", o.llm.max_tokens,
                  "LLM completion token cap");
  cmd->add_option("--llm-timeout-s", o.llm.timeout_s,
                  "LLM request timeout in seconds");
  cmd->add_option_function<double>(
         "--oracle-tokens-per-char",
         [&o](double rate) {
           o.oracle.prompt_tokens_per_char = rate;
           o.oracle.completion_tokens_per_char = rate;
         },
         "Synthetic oracle token rate per prompt/reply character");
  cmd->add_option("--oracle-seconds-per-token", o.oracle.seconds_per_token,
                  "Synthetic oracle seconds per token");
  cmd->add_option("--config", b.config_path,
                  "JSON config file (explicit flags win)");
}

// Long flag names double as config keys once dashes become underscores.
std::vector<std::string> explicit_keys(const CLI::App* cmd) {
  std::vector<std::string> keys;
  for (const CLI::Option* opt : cmd->get_options()) {
    if (opt->count() == 0) continue;
    for (std::string name : opt->get_lnames()) {
      for (char& c : name)
        if (c == '-') c = '_';
      keys.push_back(std::move(name));
    }
  }
  return keys;
}

void finalize_run_options(const CLI::App* cmd, sfnav::CliRunOptions& o,
                          const RunFlagBindings& b) {
  if (!b.nm_mode.empty()) o.run.bridge.nm_mode = sfnav::parse_nm_mode(b.nm_mode);
  if (!b.bound_form.empty())
    o.run.bridge.bound_form = sfnav::parse_bound_form(b.bound_form);
  if (!b.config_path.empty())
    sfnav::apply_config_file(o, b.config_path, explicit_keys(cmd));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Topological navigation runs with a slow planner triggered on low "
      "alignment confidence"};
  app.require_subcommand(1);

  sfnav::CliRunOptions run_opts;
  RunFlagBindings run_bind;
  CLI::App* run_cmd =
      app.add_subcommand("run", "Run an episode batch and write reports");
  add_run_flags(run_cmd, run_opts, run_bind);

  sfnav::CliRunOptions sweep_opts;
  RunFlagBindings sweep_bind;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Run the batch once per confidence threshold");
  add_run_flags(sweep_cmd, sweep_opts, sweep_bind);
  sweep_cmd->add_option("--taus", sweep_opts.taus, "Thresholds to sweep")
      ->delimiter(',');

  sfnav::CliRunOptions rec_opts;
  RunFlagBindings rec_bind;
  CLI::App* rec_cmd = app.add_subcommand(
      "record-fixtures", "Run once and save backend replies for replay");
  add_run_flags(rec_cmd, rec_opts, rec_bind);

  sfnav::CliGenOptions gen_opts;
  CLI::App* gen_cmd = app.add_subcommand(
      "gen-scenes", "Generate random scenes with episode suites");
  gen_cmd->add_option("--seed", gen_opts.params.seed, "Base seed");
  gen_cmd->add_option("--count", gen_opts.count,
                      "Number of scenes (seeds run consecutively)");
  gen_cmd->add_option("--grid-w", gen_opts.params.grid_w, "Grid width");
  gen_cmd->add_option("--grid-h", gen_opts.params.grid_h, "Grid height");
  gen_cmd->add_option("--spacing", gen_opts.params.spacing,
                      "Grid spacing in meters");
  gen_cmd->add_option("--jitter", gen_opts.params.jitter,
                      "Viewpoint position jitter");
  gen_cmd->add_option("--edge-drop", gen_opts.params.edge_drop,
                      "Fraction of non-tree edges dropped");
  gen_cmd->add_option("--objects", gen_opts.params.objects_per_scene,
                      "Objects per scene");
  gen_cmd->add_option("--episodes-per-scene",
                      gen_opts.params.episodes_per_scene,
                      "Episodes per scene");
  gen_cmd->add_option("--r-sense", gen_opts.params.r_sense,
                      "Perception radius used for route annotations");
  gen_cmd->add_option("--d-stop", gen_opts.params.d_stop,
                      "Success radius episodes are generated against");
  gen_cmd->add_option("--out-dir", gen_opts.out_dir, "Output directory");
  gen_cmd->add_option("--prefix", gen_opts.prefix, "Output file prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      finalize_run_options(run_cmd, run_opts, run_bind);
      return sfnav::cmd_run(run_opts);
    }
    if (sweep_cmd->parsed()) {
      finalize_run_options(sweep_cmd, sweep_opts, sweep_bind);
      return sfnav::cmd_sweep(sweep_opts);
    }
    if (rec_cmd->parsed()) {
      finalize_run_options(rec_cmd, rec_opts, rec_bind);
      return sfnav::cmd_record_fixtures(rec_opts);
    }
    if (gen_cmd->parsed()) return sfnav::cmd_gen_scenes(gen_opts);
  } catch (const sfnav::NavError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 3;
  }
  return 0;
}
