#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sfnav/alignment.hpp"
#include "sfnav/backends.hpp"
#include "sfnav/planner.hpp"
#include "sfnav/scene.hpp"

namespace sfnav {

struct RunConfig {
  double tau = 0.6;        // confidence trigger threshold, in [0,1]
  double d_stop = 3.0;     // success radius, meters
  double d_sub = 1.5;      // subgoal completion radius, meters
  double r_sense = 5.0;    // perception range, meters
  int t_max = 30;          // step budget
  int horizon = 3;         // max subgoals requested per replan
  double lambda = 4.0;     // verifier-token weight in unified cost
  std::uint64_t seed = 0;  // recorded in reports; feeds nothing at runtime
                           // (the engine itself is deterministic)
  long long v_tok_per_step = 0;    // synthetic verifier tokens per step
  double v_time_per_step = 0.1;    // synthetic verifier seconds per step
  bool always_replan = false;      // ablation: skip the gate, replan each step
  BridgeOptions bridge;
  PlannerOptions planner;

  void validate() const;  // throws config_error
};

// One row of an episode trace.
struct StepRecord {
  int t = 0;                  // 1-based
  ViewpointId viewpoint;      // where the step was taken from
  std::string graph_summary;  // perceived labels "a|b|c" in graph order
  std::string active_target;  // subgoal label after any replan, "" when none
  AlignmentStats align;
  bool triggered = false;  // should_trigger(confidence, tau) at this step
  std::string action;      // "stop" or "move_to:<id>"
  Vec3 position;           // viewpoint position after the action
  double ne = 0.0;         // distance to goal after the action
  long long l_tok_delta = 0;
  long long v_tok_delta = 0;
  double l_time_delta = 0.0;
  double v_time_delta = 0.0;
};

struct EpisodeResult {
  std::string episode_id;
  bool success = false;
  bool oracle_success = false;  // any visited viewpoint within d_stop
  double ne = 0.0;              // final Euclidean distance to goal position
  double tl = 0.0;              // trajectory length (sum of traversed weights)
  double shortest = 0.0;        // shortest-path length for the SPL ratio
  double spl_term = 0.0;        // success * shortest / max(tl, shortest)
  int steps = 0;
  CostLedger cost;
  double u_tok = 0.0;  // cost.l_tok + lambda * cost.v_tok, exactly
  double t_time = 0.0;  // cost.l_time + cost.v_time, exactly
  std::string error;    // "" on clean termination; error tag otherwise
  std::vector<StepRecord> trace;
  std::vector<std::string> warnings;
};

// Runs one episode: perceive, stop-check, pop reached subgoals, align,
// trigger, act. Planner, backend, and action failures end the episode with an
// error tag instead of propagating.
EpisodeResult run_episode(const Scene& scene, const Episode& episode,
                          SlowPlanner& planner, const RunConfig& config);

// Fresh planner state per episode (goal caches and replay cursors are
// episode-local). The factory is called once per episode.
using BackendFactory =
    std::function<std::shared_ptr<PlannerBackend>(const Episode&)>;

// Runs every episode in suite order; `jobs` > 1 runs episodes on that many
// worker threads. Results land at the episode's suite index either way, so
// the output is independent of scheduling. The factory is called under a lock
// when jobs > 1 and must hand each episode an isolated backend.
std::vector<EpisodeResult> run_batch(const Scene& scene,
                                     const EpisodeSuite& suite,
                                     const BackendFactory& factory,
                                     const RunConfig& config, int jobs = 1);

// Batch aggregates: every field is a mean over episodes except `episodes`,
// `failures`, and `call_count` (sum). Failed episodes count as zeros in the
// rate metrics.
struct AggregateMetrics {
  int episodes = 0;
  int failures = 0;    // episodes with a non-empty error tag
  double sr = 0.0;     // mean success
  double osr = 0.0;    // mean oracle_success
  double spl = 0.0;    // mean spl_term
  double ne = 0.0;     // mean final distance to goal
  double tl = 0.0;     // mean trajectory length
  double l_tok = 0.0;  // mean planner tokens per episode
  double v_tok = 0.0;  // mean verifier tokens per episode
  double u_tok = 0.0;  // mean unified tokens per episode
  double l_time = 0.0;
  double v_time = 0.0;
  double t_time = 0.0;
  int call_count = 0;  // total planner invocations across the batch
};

// Throws empty_batch on an empty result list.
AggregateMetrics compute_metrics(const std::vector<EpisodeResult>& results,
                                 double lambda);

// One threshold setting in a trigger sweep.
struct SweepRow {
  double tau = 0.0;
  AggregateMetrics metrics;
};

// Reruns the batch once per threshold; rows keep the given tau order with
// exact duplicates removed. Throws empty_batch when `taus` is empty.
std::vector<SweepRow> sweep_tau(const Scene& scene, const EpisodeSuite& suite,
                                const BackendFactory& factory,
                                const RunConfig& base,
                                const std::vector<double>& taus,
                                std::vector<std::string>* warnings = nullptr);

}  // namespace sfnav
