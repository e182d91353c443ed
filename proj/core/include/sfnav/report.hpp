#pragma once

#include <string>
#include <vector>

#include "sfnav/runner.hpp"

namespace sfnav {

// Deterministic serialization: floats go through a fixed round-trip format,
// keys and rows follow a fixed order. Same results, same bytes.
std::string format_double(double value);

// Full run report: config snapshot, aggregate row, one row per episode.
std::string results_to_json(const std::vector<EpisodeResult>& results,
                            const AggregateMetrics& metrics,
                            const RunConfig& config);
std::string results_to_csv(const std::vector<EpisodeResult>& results);
std::string aggregate_to_csv(const AggregateMetrics& metrics);

// One row per step across the whole batch, episodes in input order.
std::string traces_to_csv(const std::vector<EpisodeResult>& results);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string sweep_to_json(const std::vector<SweepRow>& rows,
                          const RunConfig& config);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace sfnav
