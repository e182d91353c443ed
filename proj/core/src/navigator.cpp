#include "sfnav/navigator.hpp"

#include <cmath>
#include <limits>

#include "sfnav/errors.hpp"

namespace sfnav {

bool subgoal_reached(const PerceivedGraph& graph, const Subgoal& subgoal,
                     double d_sub) {
  const PerceivedObject* seen = graph.find(subgoal.target);
  return seen && seen->edge.distance <= d_sub;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nearest unvisited neighbor; with every neighbor visited, the one entered
// longest ago. Candidates arrive id-sorted, so strict improvement keeps the
// lowest id on ties.
Action explore(std::span<const Neighbor> neighbors,
               const std::map<ViewpointId, int>& last_visit) {
  const Neighbor* nearest_new = nullptr;
  double nearest_w = kInf;
  const Neighbor* stalest = nullptr;
  int stalest_step = std::numeric_limits<int>::max();
  for (const Neighbor& nb : neighbors) {
    auto it = last_visit.find(nb.id);
    if (it == last_visit.end()) {
      if (nb.weight < nearest_w) {
        nearest_w = nb.weight;
        nearest_new = &nb;
      }
    } else if (it->second < stalest_step) {
      stalest_step = it->second;
      stalest = &nb;
    }
  }
  return Action::move_to(nearest_new ? nearest_new->id : stalest->id);
}

const Neighbor* argmin_distance(std::span<const Neighbor> neighbors,
                                const Vec3& target) {
  const Neighbor* best = nullptr;
  double best_d = kInf;
  for (const Neighbor& nb : neighbors) {
    const double d = distance(nb.position, target);
    if (d < best_d) {
      best_d = d;
      best = &nb;
    }
  }
  return best;
}

const Neighbor* argmax_projection(std::span<const Neighbor> neighbors,
                                  const Vec3& here, const Vec3& target) {
  // Zero direction (agent on top of the target) degrades to the id tie.
  Vec3 dir = target - here;
  const double len = dir.norm();
  if (len > 0.0) dir = dir * (1.0 / len);
  const Neighbor* best = nullptr;
  double best_proj = -kInf;
  for (const Neighbor& nb : neighbors) {
    const double proj = (nb.position - here).dot(dir);
    if (proj > best_proj) {
      best_proj = proj;
      best = &nb;
    }
  }
  return best;
}

const Neighbor* argmax_vertical(std::span<const Neighbor> neighbors,
                                const Vec3& here, const Vec3& target,
                                double sign) {
  const Neighbor* best = nullptr;
  double best_dz = -kInf;
  double best_d = kInf;
  for (const Neighbor& nb : neighbors) {
    const double dz = sign * (nb.position.z - here.z);
    const double d = distance(nb.position, target);
    if (dz > best_dz || (dz == best_dz && d < best_d)) {
      best_dz = dz;
      best_d = d;
      best = &nb;
    }
  }
  return best;
}

}  // namespace

Action select_action(const Scene& scene, const NavState& state,
                     const PerceivedGraph& graph) {
  std::span<const Neighbor> neighbors = scene.neighbors(state.viewpoint);
  if (neighbors.empty())
    throw NavError(ErrorCode::dead_end,
                   "viewpoint \"" + state.viewpoint + "\" has no neighbors");

  const Subgoal* subgoal = state.active_subgoal();
  const PerceivedObject* seen =
      subgoal ? graph.find(subgoal->target) : nullptr;
  if (!seen) return explore(neighbors, state.last_visit);

  const Vec3 here = scene.viewpoint_or_throw(state.viewpoint).position;
  const Vec3 target = here + seen->node.position;

  const Neighbor* best = nullptr;
  switch (subgoal->skill) {
    case Skill::approach:
      best = argmin_distance(neighbors, target);
      break;
    case Skill::through:
      best = argmax_projection(neighbors, here, target);
      break;
    case Skill::go_up:
      best = argmax_vertical(neighbors, here, target, 1.0);
      break;
    case Skill::go_down:
      best = argmax_vertical(neighbors, here, target, -1.0);
      break;
  }
  return Action::move_to(best->id);
}

}  // namespace sfnav
