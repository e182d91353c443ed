#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sfnav/backends.hpp"
#include "sfnav/runner.hpp"
#include "sfnav/scene_gen.hpp"

namespace sfnav {

// Shared CLI options resolved from (highest wins) command-line flags, a JSON
// config file, built-in defaults.
struct CliRunOptions {
  std::string scene_path;
  std::string episodes_path;
  std::string backend = "oracle";  // oracle | llm | replay
  std::string fixtures_path;       // replay input / recording output
  bool record = false;             // wrap the backend and save fixtures
  std::string out_dir = ".";
  std::string report_path;         // overrides <out_dir>/report.json
  std::string trace_path;          // overrides <out_dir>/traces.csv; implies traces
  std::string report_format = "json";  // json | csv
  bool write_traces = false;
  int jobs = 1;
  RunConfig run;
  LlmConfig llm;
  OracleCosts oracle;
  std::vector<double> taus = {1.0, 0.95, 0.85, 0.6, 0.4};  // sweep only
};

// Applies a JSON config file onto `options`; unknown keys are config_error.
// `explicit_flags` lists flag names the user set, which keep precedence over
// file values.
void apply_config_file(CliRunOptions& options, const std::string& path,
                       const std::vector<std::string>& explicit_flags);

int cmd_run(const CliRunOptions& options);
int cmd_sweep(const CliRunOptions& options);

struct CliGenOptions {
  GenParams params;
  int count = 1;
  std::string out_dir = ".";
  std::string prefix = "scene";
};

int cmd_gen_scenes(const CliGenOptions& options);

// Runs the batch against the configured backend with recording on and writes
// the fixture file for later replay.
int cmd_record_fixtures(const CliRunOptions& options);

}  // namespace sfnav
