#include "sfnav/runner.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include "sfnav/navigator.hpp"

namespace sfnav {

void RunConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw NavError(ErrorCode::config_error, what);
  };
  if (tau < 0.0 || tau > 1.0) fail("tau must be in [0,1]");
  if (d_stop <= 0.0) fail("d_stop must be positive");
  if (d_sub <= 0.0) fail("d_sub must be positive");
  if (r_sense <= 0.0) fail("r_sense must be positive");
  if (t_max <= 0) fail("t_max must be positive");
  if (horizon <= 0) fail("horizon must be positive");
  if (lambda <= 0.0) fail("lambda must be positive");
  if (v_tok_per_step < 0) fail("v_tok_per_step must be nonnegative");
  if (v_time_per_step < 0.0) fail("v_time_per_step must be nonnegative");
  if (bridge.window < 0) fail("window must be nonnegative");
}

namespace {

// Degenerate alignments (no usable evidence yet) force a trigger: the stats
// carry the convention matrices and confidence 0.
AlignmentStats degenerate_stats(const DegenerateInput& ex) {
  AlignmentStats stats;
  stats.pq = ex.matrices;
  stats.p11 = ex.matrices.p.p11;
  stats.ambiguity_bound_raw = 1.0;
  stats.ambiguity_prob = 1.0;
  stats.confidence = 0.0;
  stats.degenerate = true;
  return stats;
}

std::string summarize(const PerceivedGraph& graph) {
  std::string out;
  for (const auto& o : graph.objects) {
    if (!out.empty()) out += '|';
    out += o.node.label;
  }
  return out;
}

ImaginedGraph imagined_for(const Subgoal& subgoal, int subgoal_index,
                           int timestep) {
  ImaginedGraph g;
  g.timestep = timestep;
  g.subgoal_index = subgoal_index;
  for (const std::string& label : subgoal.imagined_objects)
    g.expected.push_back(ImaginedGraph::Expected{label, std::nullopt});
  return g;  // labels arrive sorted and unique from the chain parser
}

}  // namespace

EpisodeResult run_episode(const Scene& scene, const Episode& episode,
                          SlowPlanner& planner, const RunConfig& config) {
  config.validate();

  EpisodeResult result;
  result.episode_id = episode.id;

  ViewpointId viewpoint = episode.start_viewpoint;
  std::set<ViewpointId> visited;
  std::map<ViewpointId, int> last_visit;
  GraphHistory history;
  std::vector<std::string> executed;  // reached subgoal labels, in order
  SubgoalChain chain;
  std::size_t cursor = 0;
  // Identity of the imagined entry most recently appended: (generation,
  // subgoal index). Each activation appends exactly once.
  int generation = 0;
  std::pair<int, std::size_t> last_activated{-1, 0};

  auto goal_distance = [&](const ViewpointId& id) {
    return distance(scene.viewpoint_or_throw(id).position,
                    episode.goal_position);
  };

  try {
    validate_episode(scene, episode);
    result.shortest = shortest_path_length(scene, episode.start_viewpoint,
                                           episode.goal_position,
                                           config.d_stop);
    visited.insert(viewpoint);
    last_visit[viewpoint] = 0;

    // Goal extraction and the initial chain run before any movement, on an
    // empty context.
    PlanContext context;
    context.episode_id = episode.id;
    context.instruction = episode.instruction;
    planner.extract_goal(context, result.cost);
    chain = planner.plan(context, result.cost);
    chain.created_at = 0;
    cursor = 0;

    auto activate = [&](int timestep) {
      if (cursor >= chain.subgoals.size()) return;
      std::pair<int, std::size_t> key{generation, cursor};
      if (key == last_activated) return;
      // A replan inside this step supersedes the entry activated moments
      // ago at the same timestep.
      if (!history.imagined.empty() &&
          history.imagined.back().timestep == timestep)
        history.imagined.pop_back();
      append_history(history, imagined_for(chain.subgoals[cursor],
                                           static_cast<int>(cursor), timestep));
      last_activated = key;
    };

    // Planner-cost marks: the initial goal/plan spend is attributed to the
    // first step's deltas so the deltas sum to the ledger exactly.
    long long l_tok_mark = 0;
    double l_time_mark = 0.0;

    for (int t = 1; t <= config.t_max; ++t) {
      StepRecord record;
      record.t = t;
      record.viewpoint = viewpoint;

      // 1. Perceive and extend the evidence.
      std::vector<Detection> detections = observe(scene, viewpoint, config.r_sense);
      PerceivedGraph graph =
          build_perceived_graph(detections, t, &result.warnings);
      record.graph_summary = summarize(graph);
      append_history(history, graph);
      result.cost.v_tok += config.v_tok_per_step;
      result.cost.v_time += config.v_time_per_step;
      record.v_tok_delta = config.v_tok_per_step;
      record.v_time_delta = config.v_time_per_step;

      // 2. Pop the subgoal just reached (at most one per step).
      if (cursor < chain.subgoals.size() &&
          subgoal_reached(graph, chain.subgoals[cursor], config.d_sub)) {
        executed.push_back(chain.subgoals[cursor].target);
        ++cursor;
      }

      // 3. The active subgoal's expectation enters the imagined history the
      // first timestep it is active.
      activate(t);

      // 4. Alignment confidence.
      AlignmentStats stats;
      try {
        stats = confidence(history, config.bridge);
      } catch (const DegenerateInput& ex) {
        stats = degenerate_stats(ex);
      }
      record.align = stats;
      record.triggered = config.always_replan
                             ? true
                             : should_trigger(stats.confidence, config.tau);

      // 5. Terminal check: the extracted goal object is visible within
      // d_stop. No planner call on the way out.
      const PerceivedObject* goal_seen = graph.find(chain.goal);
      if (goal_seen && goal_seen->edge.distance <= config.d_stop) {
        record.active_target =
            cursor < chain.subgoals.size() ? chain.subgoals[cursor].target : "";
        record.action = "stop";
        record.position = scene.viewpoint_or_throw(viewpoint).position;
        record.ne = goal_distance(viewpoint);
        record.l_tok_delta = result.cost.l_tok - l_tok_mark;
        record.l_time_delta = result.cost.l_time - l_time_mark;
        result.trace.push_back(std::move(record));
        break;
      }

      // 6. Replan when the bridge says the alignment is no longer reliable.
      if (record.triggered) {
        PlanContext replan_context;
        replan_context.episode_id = episode.id;
        replan_context.instruction = episode.instruction;
        replan_context.executed_history = executed;
        replan_context.current_graph = &graph;
        chain = planner.plan(replan_context, result.cost);
        chain.created_at = t;
        cursor = 0;
        ++generation;
        activate(t);
      }
      record.active_target =
          cursor < chain.subgoals.size() ? chain.subgoals[cursor].target : "";

      // 7. One reactive move.
      NavState state;
      state.viewpoint = viewpoint;
      state.chain = chain;
      state.chain_cursor = cursor;
      state.last_visit = last_visit;
      Action action = select_action(scene, state, graph);
      ViewpointId next = step(scene, viewpoint, action);
      if (next != viewpoint) {
        for (const Neighbor& nb : scene.neighbors(viewpoint)) {
          if (nb.id == next) {
            result.tl += nb.weight;
            break;
          }
        }
      }
      viewpoint = next;
      visited.insert(viewpoint);
      last_visit[viewpoint] = t;

      record.action = action.type == Action::Type::stop
                          ? "stop"
                          : "move_to:" + action.target;
      record.position = scene.viewpoint_or_throw(viewpoint).position;
      record.ne = goal_distance(viewpoint);
      record.l_tok_delta = result.cost.l_tok - l_tok_mark;
      record.l_time_delta = result.cost.l_time - l_time_mark;
      l_tok_mark = result.cost.l_tok;
      l_time_mark = result.cost.l_time;
      result.trace.push_back(std::move(record));
    }
  } catch (const NavError& e) {
    result.error = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    result.error = std::string("exception: ") + e.what();
  }

  result.steps = static_cast<int>(result.trace.size());
  if (scene.find_viewpoint(viewpoint)) result.ne = goal_distance(viewpoint);
  result.success = result.error.empty() && result.ne <= config.d_stop;
  result.oracle_success = false;
  for (const ViewpointId& id : visited) {
    if (goal_distance(id) <= config.d_stop) {
      result.oracle_success = true;
      break;
    }
  }
  if (result.success) {
    // Start-at-goal convention: a zero-length optimum scores full marks.
    result.spl_term = result.shortest == 0.0
                          ? 1.0
                          : result.shortest /
                                std::max(result.tl, result.shortest);
  } else {
    result.spl_term = 0.0;
  }
  result.u_tok = result.cost.unified_tokens(config.lambda);
  result.t_time = result.cost.total_time();
  return result;
}

std::vector<EpisodeResult> run_batch(const Scene& scene,
                                     const EpisodeSuite& suite,
                                     const BackendFactory& factory,
                                     const RunConfig& config, int jobs) {
  config.validate();
  if (jobs < 1)
    throw NavError(ErrorCode::config_error, "jobs must be positive");

  std::vector<EpisodeResult> results(suite.episodes.size());
  std::mutex factory_mutex;
  auto run_one = [&](std::size_t index) {
    const Episode& episode = suite.episodes[index];
    PlannerOptions options = config.planner;
    options.max_subgoals = config.horizon;
    EpisodeResult result;
    try {
      std::shared_ptr<PlannerBackend> backend;
      {
        std::lock_guard<std::mutex> lock(factory_mutex);
        backend = factory(episode);
      }
      SlowPlanner planner(std::move(backend), options);
      result = run_episode(scene, episode, planner, config);
    } catch (const NavError& e) {
      result.episode_id = episode.id;
      result.error = std::string(to_string(e.code())) + ": " + e.what();
    }
    results[index] = std::move(result);
  };

  if (jobs == 1 || suite.episodes.size() < 2) {
    for (std::size_t i = 0; i < suite.episodes.size(); ++i) run_one(i);
    return results;
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= suite.episodes.size()) return;
      run_one(i);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t width =
      std::min<std::size_t>(jobs, suite.episodes.size());
  pool.reserve(width);
  for (std::size_t i = 0; i < width; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  return results;
}

}  // namespace sfnav
