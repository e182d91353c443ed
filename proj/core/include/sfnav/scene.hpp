#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sfnav/geometry.hpp"
#include "sfnav/graph.hpp"
#include "sfnav/skills.hpp"

namespace sfnav {

using ViewpointId = std::string;

struct Viewpoint {
  ViewpointId id;
  Vec3 position;
};

struct SceneObject {
  std::string label;  // normalized
  Vec3 position;
};

// One landmark along an annotated route: the object to head for, how to
// execute it, and the labels expected around it.
struct RouteStep {
  std::string object;
  Skill skill = Skill::approach;
  std::vector<std::string> neighborhood;  // sorted, includes `object`
};

struct Route {
  std::string id;
  std::vector<RouteStep> steps;
};

struct Neighbor {
  ViewpointId id;
  Vec3 position;
  double weight = 0.0;  // edge weight == Euclidean distance
};

// Immutable topological environment. `validate_and_index()` must run after
// the fields are filled (the loader and the generator both do); it checks the
// structural invariants and builds the lookup tables.
class Scene {
 public:
  std::string name;
  std::vector<Viewpoint> viewpoints;  // sorted by id after indexing
  struct Edge {
    ViewpointId a, b;
    double weight = 0.0;
  };
  std::vector<Edge> edges;  // undirected, stored once per pair
  std::vector<SceneObject> objects;
  std::vector<Route> routes;

  // Checks: unique ids, symmetric adjacency with no self-loops or duplicate
  // edges, weights equal to Euclidean distance within 1e-6, connected graph,
  // normalized labels, route references intact.
  // Throws NavError(scene_error) on violation.
  void validate_and_index();

  const Viewpoint* find_viewpoint(const ViewpointId& id) const;
  const Viewpoint& viewpoint_or_throw(const ViewpointId& id) const;
  std::span<const Neighbor> neighbors(const ViewpointId& id) const;  // sorted by id
  const Route* find_route(const std::string& route_id) const;

 private:
  std::map<ViewpointId, std::size_t> viewpoint_index_;
  std::map<ViewpointId, std::vector<Neighbor>> adjacency_;
  std::map<std::string, std::size_t> route_index_;
};

struct Episode {
  std::string id;
  std::string instruction;
  ViewpointId start_viewpoint;
  std::string goal_object;  // normalized label
  Vec3 goal_position;
  std::vector<ViewpointId> gold_path;  // starts at start_viewpoint, consecutive
                                       // entries adjacent
  std::string route_id;                // optional oracle-planner annotation
};

struct EpisodeSuite {
  std::string scene_name;
  std::vector<Episode> episodes;
};

// Movement command for one step. `stop` ends the episode in place.
struct Action {
  enum class Type { move_to, stop };
  Type type = Type::stop;
  ViewpointId target;  // move_to only

  static Action move_to(ViewpointId id) {
    return {Type::move_to, std::move(id)};
  }
  static Action stop() { return {Type::stop, {}}; }
};

// All objects within r_sense of the viewpoint, positions relative to it,
// ordered by (distance, label). Throws scene_error on unknown viewpoint.
std::vector<Detection> observe(const Scene& scene, const ViewpointId& viewpoint,
                               double r_sense);

// Executes one action: move_to returns the target (must be adjacent, else
// illegal_action), stop returns `current`.
ViewpointId step(const Scene& scene, const ViewpointId& current,
                 const Action& action);

// Length of the shortest viewpoint-graph path from `from` to any viewpoint
// within d_stop of `to_position`. Throws scene_error when no viewpoint
// qualifies (malformed episode).
double shortest_path_length(const Scene& scene, const ViewpointId& from,
                            const Vec3& to_position, double d_stop);

// Validation used by the episode loader; throws scene_error on violation.
void validate_episode(const Scene& scene, const Episode& episode);

}  // namespace sfnav
