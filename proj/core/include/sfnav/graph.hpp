#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfnav/geometry.hpp"

namespace sfnav {

// Canonical form for object labels: lowercase, trimmed, internal whitespace
// collapsed to single spaces. Perceived and imagined graphs must agree on
// this form because all cross-graph matching is label-based.
// Throws NavError(empty_label) if nothing is left after normalization.
std::string normalize_label(std::string_view raw);

struct ObjectNode {
  std::string label;   // normalized
  Vec3 position;       // meters, relative to the agent at observation time
  int last_seen = 0;   // timestep of the most recent observation
};

struct StarEdge {
  double distance = 0.0;  // meters, Euclidean norm of the object position
  double bearing = 0.0;   // radians in [-pi, pi), atan2(y, x) in the agent's
                          // x-forward / y-left horizontal plane
};

struct PerceivedObject {
  ObjectNode node;
  StarEdge edge;
};

// One detector output: a labeled object at a position relative to the agent.
struct Detection {
  std::string label;
  Vec3 relative_position;
};

// Star-topology snapshot of the scene at one timestep: a single implicit
// agent node plus one edge per observed object. Object labels are unique
// within a graph.
struct PerceivedGraph {
  int timestep = 0;
  std::vector<PerceivedObject> objects;  // sorted by (distance, label)

  bool contains(std::string_view label) const;
  const PerceivedObject* find(std::string_view label) const;
};

// Planner-generated prior of the objects expected around a subgoal.
// Positions are advisory; alignment uses label membership only.
struct ImaginedGraph {
  int timestep = -1;      // perceived timestep at which the subgoal became
                          // active; -1 until appended to a history
  int subgoal_index = 0;  // position within the chain that produced it

  struct Expected {
    std::string label;  // normalized
    std::optional<Vec3> position;
  };
  std::vector<Expected> expected;  // sorted by label, unique

  bool contains(std::string_view label) const;
};

// Per-episode accumulation of both graph kinds, ordered by timestep.
// Timesteps are strictly increasing within each list.
struct GraphHistory {
  std::vector<PerceivedGraph> perceived;
  std::vector<ImaginedGraph> imagined;
};

// Builds the star graph for one observation. Duplicate labels within the
// observation are collapsed to the nearest instance; each collapse appends a
// note to `warnings` when given. Throws NavError(empty_label) on blank labels.
PerceivedGraph build_perceived_graph(std::span<const Detection> observation,
                                     int timestep,
                                     std::vector<std::string>* warnings = nullptr);

// Appends preserving strictly increasing timesteps.
// Throws NavError(out_of_order) otherwise.
void append_history(GraphHistory& history, PerceivedGraph graph);
void append_history(GraphHistory& history, ImaginedGraph graph);

}  // namespace sfnav
