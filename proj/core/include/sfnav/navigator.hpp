#pragma once

#include <map>
#include <string>

#include "sfnav/graph.hpp"
#include "sfnav/planner.hpp"
#include "sfnav/scene.hpp"

namespace sfnav {

// Fast controller state: where we are, what the slow planner last said, and
// when each viewpoint was last entered (for the exploration fallback).
// Invariant: `viewpoint` has an entry in `last_visit`.
struct NavState {
  ViewpointId viewpoint;
  SubgoalChain chain;
  std::size_t chain_cursor = 0;            // first unexecuted subgoal
  std::map<ViewpointId, int> last_visit;   // viewpoint -> last entry step

  const Subgoal* active_subgoal() const {
    return chain_cursor < chain.subgoals.size() ? &chain.subgoals[chain_cursor]
                                                : nullptr;
  }
};

// True when the subgoal's target is visible within d_sub of the agent.
bool subgoal_reached(const PerceivedGraph& graph, const Subgoal& subgoal,
                     double d_sub);

// One reactive decision, always a move (stopping is the runner's terminal
// check). With the target visible, the skill picks the neighbor:
//   approach   minimizing Euclidean distance to the target;
//   through    maximizing the projection of (neighbor - agent) onto the
//              agent->target direction, so neighbors past the target win;
//   go_up      with the greatest z-increase, ties by distance to target;
//   go_down    with the greatest z-decrease, ties by distance to target.
// With no active subgoal or the target not visible, explores: the nearest
// unvisited neighbor, or the least-recently-visited one when all neighbors
// have been seen. Every rule breaks remaining ties by lowest viewpoint id.
// Throws dead_end when the current viewpoint has no neighbors.
Action select_action(const Scene& scene, const NavState& state,
                     const PerceivedGraph& graph);

}  // namespace sfnav
