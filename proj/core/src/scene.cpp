#include "sfnav/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

#include "sfnav/errors.hpp"

namespace sfnav {

namespace {

[[noreturn]] void scene_fail(const std::string& what) {
  throw NavError(ErrorCode::scene_error, what);
}

}  // namespace

void Scene::validate_and_index() {
  viewpoint_index_.clear();
  adjacency_.clear();
  route_index_.clear();

  if (viewpoints.empty()) scene_fail("scene \"" + name + "\" has no viewpoints");

  std::sort(viewpoints.begin(), viewpoints.end(),
            [](const Viewpoint& a, const Viewpoint& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < viewpoints.size(); ++i) {
    if (viewpoints[i].id.empty()) scene_fail("viewpoint with empty id");
    auto [it, inserted] = viewpoint_index_.emplace(viewpoints[i].id, i);
    if (!inserted) scene_fail("duplicate viewpoint id \"" + viewpoints[i].id + "\"");
  }

  std::set<std::pair<ViewpointId, ViewpointId>> seen;
  for (Edge& e : edges) {
    if (e.a == e.b) scene_fail("self-loop at viewpoint \"" + e.a + "\"");
    const Viewpoint* va = find_viewpoint(e.a);
    const Viewpoint* vb = find_viewpoint(e.b);
    if (!va || !vb)
      scene_fail("edge references unknown viewpoint \"" + (va ? e.b : e.a) + "\"");
    auto key = e.a < e.b ? std::make_pair(e.a, e.b) : std::make_pair(e.b, e.a);
    if (!seen.insert(key).second)
      scene_fail("duplicate edge " + e.a + " -- " + e.b);
    const double euclid = distance(va->position, vb->position);
    if (e.weight == 0.0) e.weight = euclid;  // loader may omit weights
    if (std::abs(e.weight - euclid) > 1e-6)
      scene_fail("edge " + e.a + " -- " + e.b + " weight " +
                 std::to_string(e.weight) + " != distance " +
                 std::to_string(euclid));
    adjacency_[e.a].push_back(Neighbor{e.b, vb->position, e.weight});
    adjacency_[e.b].push_back(Neighbor{e.a, va->position, e.weight});
  }
  for (auto& [id, list] : adjacency_) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
  }

  // Connectivity: BFS from the first viewpoint must reach all of them.
  std::set<ViewpointId> reached;
  std::queue<ViewpointId> frontier;
  frontier.push(viewpoints.front().id);
  reached.insert(viewpoints.front().id);
  while (!frontier.empty()) {
    ViewpointId cur = frontier.front();
    frontier.pop();
    for (const Neighbor& nb : neighbors(cur)) {
      if (reached.insert(nb.id).second) frontier.push(nb.id);
    }
  }
  if (reached.size() != viewpoints.size())
    scene_fail("scene graph is disconnected (" + std::to_string(reached.size()) +
               "/" + std::to_string(viewpoints.size()) + " reachable)");

  std::set<std::string> object_labels;
  for (SceneObject& o : objects) {
    o.label = normalize_label(o.label);
    object_labels.insert(o.label);
  }
  std::sort(objects.begin(), objects.end(),
            [](const SceneObject& a, const SceneObject& b) {
              if (a.label != b.label) return a.label < b.label;
              if (a.position.x != b.position.x) return a.position.x < b.position.x;
              if (a.position.y != b.position.y) return a.position.y < b.position.y;
              return a.position.z < b.position.z;
            });

  for (std::size_t i = 0; i < routes.size(); ++i) {
    Route& r = routes[i];
    if (r.id.empty()) scene_fail("route with empty id");
    if (!route_index_.emplace(r.id, i).second)
      scene_fail("duplicate route id \"" + r.id + "\"");
    for (RouteStep& s : r.steps) {
      s.object = normalize_label(s.object);
      if (!object_labels.count(s.object))
        scene_fail("route \"" + r.id + "\" references unknown object \"" +
                   s.object + "\"");
      for (std::string& nb : s.neighborhood) nb = normalize_label(nb);
      std::sort(s.neighborhood.begin(), s.neighborhood.end());
      s.neighborhood.erase(
          std::unique(s.neighborhood.begin(), s.neighborhood.end()),
          s.neighborhood.end());
      if (!std::binary_search(s.neighborhood.begin(), s.neighborhood.end(),
                              s.object)) {
        s.neighborhood.insert(
            std::lower_bound(s.neighborhood.begin(), s.neighborhood.end(),
                             s.object),
            s.object);
      }
    }
  }
}

const Viewpoint* Scene::find_viewpoint(const ViewpointId& id) const {
  auto it = viewpoint_index_.find(id);
  return it == viewpoint_index_.end() ? nullptr : &viewpoints[it->second];
}

const Viewpoint& Scene::viewpoint_or_throw(const ViewpointId& id) const {
  const Viewpoint* v = find_viewpoint(id);
  if (!v) scene_fail("unknown viewpoint \"" + id + "\"");
  return *v;
}

std::span<const Neighbor> Scene::neighbors(const ViewpointId& id) const {
  auto it = adjacency_.find(id);
  if (it == adjacency_.end()) return {};
  return {it->second.data(), it->second.size()};
}

const Route* Scene::find_route(const std::string& route_id) const {
  auto it = route_index_.find(route_id);
  return it == route_index_.end() ? nullptr : &routes[it->second];
}

std::vector<Detection> observe(const Scene& scene, const ViewpointId& viewpoint,
                               double r_sense) {
  const Viewpoint& vp = scene.viewpoint_or_throw(viewpoint);
  std::vector<Detection> out;
  for (const SceneObject& o : scene.objects) {
    Vec3 rel = o.position - vp.position;
    if (rel.norm() <= r_sense) out.push_back(Detection{o.label, rel});
  }
  std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    double da = a.relative_position.norm(), db = b.relative_position.norm();
    if (da != db) return da < db;
    return a.label < b.label;
  });
  return out;
}

ViewpointId step(const Scene& scene, const ViewpointId& current,
                 const Action& action) {
  scene.viewpoint_or_throw(current);
  if (action.type == Action::Type::stop) return current;
  for (const Neighbor& nb : scene.neighbors(current)) {
    if (nb.id == action.target) return action.target;
  }
  throw NavError(ErrorCode::illegal_action,
                 "move_to " + action.target + " is not adjacent to " + current);
}

double shortest_path_length(const Scene& scene, const ViewpointId& from,
                            const Vec3& to_position, double d_stop) {
  scene.viewpoint_or_throw(from);

  std::set<ViewpointId> goals;
  for (const Viewpoint& v : scene.viewpoints) {
    if (distance(v.position, to_position) <= d_stop) goals.insert(v.id);
  }
  if (goals.empty())
    scene_fail("no viewpoint within " + std::to_string(d_stop) +
               " m of the goal position");
  if (goals.count(from)) return 0.0;

  // Dijkstra over edge weights; viewpoint ids break distance ties so the
  // settled order is deterministic.
  std::map<ViewpointId, double> dist;
  dist[from] = 0.0;
  using Entry = std::pair<double, ViewpointId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  heap.push({0.0, from});
  while (!heap.empty()) {
    auto [d, id] = heap.top();
    heap.pop();
    auto it = dist.find(id);
    if (it != dist.end() && d > it->second) continue;
    if (goals.count(id)) return d;
    for (const Neighbor& nb : scene.neighbors(id)) {
      double nd = d + nb.weight;
      auto found = dist.find(nb.id);
      if (found == dist.end() || nd < found->second) {
        dist[nb.id] = nd;
        heap.push({nd, nb.id});
      }
    }
  }
  scene_fail("goal viewpoints unreachable from \"" + from + "\"");
}

void validate_episode(const Scene& scene, const Episode& episode) {
  if (episode.id.empty()) scene_fail("episode with empty id");
  scene.viewpoint_or_throw(episode.start_viewpoint);
  if (episode.goal_object.empty())
    scene_fail("episode \"" + episode.id + "\" has no goal object");
  if (!episode.route_id.empty() && !scene.find_route(episode.route_id))
    scene_fail("episode \"" + episode.id + "\" references unknown route \"" +
               episode.route_id + "\"");
  if (!episode.gold_path.empty()) {
    if (episode.gold_path.front() != episode.start_viewpoint)
      scene_fail("episode \"" + episode.id +
                 "\" gold path does not start at the start viewpoint");
    for (std::size_t i = 0; i + 1 < episode.gold_path.size(); ++i) {
      bool adjacent = false;
      for (const Neighbor& nb : scene.neighbors(episode.gold_path[i])) {
        if (nb.id == episode.gold_path[i + 1]) {
          adjacent = true;
          break;
        }
      }
      if (!adjacent)
        scene_fail("episode \"" + episode.id + "\" gold path hop " +
                   episode.gold_path[i] + " -> " + episode.gold_path[i + 1] +
                   " is not an edge");
    }
  }
}

}  // namespace sfnav
