#include "sfnav/scene_gen.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "sfnav/errors.hpp"
#include "sfnav/rng.hpp"

namespace sfnav {

namespace {

const char* kVocabulary[] = {
    "door",   "table",  "chair",  "sofa",   "plant",  "lamp",
    "shelf",  "sink",   "fridge", "window", "desk",   "bed",
    "mirror", "cabinet", "stairs", "rug",   "vase",   "clock",
    "stool",  "bench",
};
constexpr std::size_t kVocabularySize =
    sizeof(kVocabulary) / sizeof(kVocabulary[0]);

std::string viewpoint_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "vp_%03d", index);
  return buf;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

// Dijkstra with parent tracking, start viewpoint to target viewpoint.
std::vector<ViewpointId> dijkstra_path(const Scene& scene,
                                       const ViewpointId& from,
                                       const ViewpointId& to) {
  std::map<ViewpointId, double> dist;
  std::map<ViewpointId, ViewpointId> parent;
  dist[from] = 0.0;
  using Entry = std::pair<double, ViewpointId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  heap.push({0.0, from});
  while (!heap.empty()) {
    auto [d, id] = heap.top();
    heap.pop();
    if (d > dist[id]) continue;
    if (id == to) break;
    for (const Neighbor& nb : scene.neighbors(id)) {
      double nd = d + nb.weight;
      auto it = dist.find(nb.id);
      if (it == dist.end() || nd < it->second) {
        dist[nb.id] = nd;
        parent[nb.id] = id;
        heap.push({nd, nb.id});
      }
    }
  }
  std::vector<ViewpointId> path;
  if (!dist.count(to)) return path;
  for (ViewpointId cur = to;; cur = parent[cur]) {
    path.push_back(cur);
    if (cur == from) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<std::string> labels_near(const Scene& scene, const Vec3& center,
                                     double radius) {
  std::set<std::string> labels;
  for (const SceneObject& o : scene.objects) {
    if (distance(o.position, center) <= radius) labels.insert(o.label);
  }
  return {labels.begin(), labels.end()};
}

}  // namespace

GeneratedScene generate_scene(const GenParams& params) {
  if (params.grid_w < 2 || params.grid_h < 1)
    throw NavError(ErrorCode::config_error, "grid must be at least 2x1");
  if (params.objects_per_scene < 2)
    throw NavError(ErrorCode::config_error, "need at least 2 objects");
  if (params.episodes_per_scene < 1)
    throw NavError(ErrorCode::config_error, "need at least 1 episode");

  Rng rng(params.seed);
  GeneratedScene out;
  Scene& scene = out.scene;
  scene.name = "gen_" + std::to_string(params.seed);

  // Jittered grid of viewpoints, row-major ids.
  const int w = params.grid_w, h = params.grid_h;
  auto index_of = [w](int ix, int iy) { return iy * w + ix; };
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      Viewpoint vp;
      vp.id = viewpoint_name(index_of(ix, iy));
      vp.position =
          Vec3{ix * params.spacing +
                   rng.range_real(-params.jitter, params.jitter),
               iy * params.spacing +
                   rng.range_real(-params.jitter, params.jitter),
               0.0};
      scene.viewpoints.push_back(std::move(vp));
    }
  }

  // Grid adjacencies; a random spanning tree survives, then edge_drop of the
  // remainder is deleted so connectivity is never lost.
  std::vector<std::pair<int, int>> grid_edges;
  for (int iy = 0; iy < h; ++iy) {
    for (int ix = 0; ix < w; ++ix) {
      if (ix + 1 < w)
        grid_edges.emplace_back(index_of(ix, iy), index_of(ix + 1, iy));
      if (iy + 1 < h)
        grid_edges.emplace_back(index_of(ix, iy), index_of(ix, iy + 1));
    }
  }
  std::vector<std::size_t> order(grid_edges.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  UnionFind uf(w * h);
  std::vector<std::size_t> tree, extra;
  for (std::size_t idx : order) {
    auto [a, b] = grid_edges[idx];
    if (uf.unite(a, b))
      tree.push_back(idx);
    else
      extra.push_back(idx);
  }
  rng.shuffle(extra);
  const std::size_t drop =
      static_cast<std::size_t>(params.edge_drop * static_cast<double>(extra.size()));
  extra.resize(extra.size() - std::min(drop, extra.size()));

  std::vector<std::size_t> kept = tree;
  kept.insert(kept.end(), extra.begin(), extra.end());
  std::sort(kept.begin(), kept.end());
  for (std::size_t idx : kept) {
    auto [a, b] = grid_edges[idx];
    scene.edges.push_back(
        Scene::Edge{viewpoint_name(a), viewpoint_name(b), 0.0});
  }

  // Objects sit close to distinct viewpoints (well inside d_sub reach) with
  // unique labels so goals are unambiguous.
  std::vector<int> homes(static_cast<std::size_t>(w) * h);
  std::iota(homes.begin(), homes.end(), 0);
  rng.shuffle(homes);
  const int object_count = params.objects_per_scene;
  std::vector<int> object_home(object_count);
  for (int i = 0; i < object_count; ++i) {
    object_home[i] = homes[i % homes.size()];
    std::string label = kVocabulary[i % kVocabularySize];
    if (i >= static_cast<int>(kVocabularySize))
      label += " " + std::to_string(i / static_cast<int>(kVocabularySize) + 1);
    const Vec3 base = scene.viewpoints[object_home[i]].position;
    const double radius = rng.range_real(0.2, 0.9);
    const double angle = rng.range_real(0.0, 6.283185307179586);
    SceneObject obj;
    obj.label = label;
    obj.position = Vec3{base.x + radius * std::cos(angle),
                        base.y + radius * std::sin(angle), base.z};
    scene.objects.push_back(std::move(obj));
  }

  scene.validate_and_index();

  // Episodes: random start, goal object far enough to need movement, a gold
  // path to the goal's home viewpoint, and an annotated route derived from
  // the nearest completable object at each path viewpoint.
  out.suite.scene_name = scene.name;
  for (int k = 0; k < params.episodes_per_scene; ++k) {
    Episode ep;
    ep.id = "ep_" + std::to_string(params.seed) + "_" + std::to_string(k);

    int goal_index = static_cast<int>(rng.bounded(object_count));
    int start_index = static_cast<int>(rng.bounded(homes.size()));
    const SceneObject* goal = nullptr;
    for (int attempt = 0; attempt < 32; ++attempt) {
      goal = &scene.objects[static_cast<std::size_t>(goal_index) %
                            scene.objects.size()];
      const Vec3 start_pos =
          scene.viewpoints[start_index % scene.viewpoints.size()].position;
      if (distance(start_pos, goal->position) >
          params.spacing + params.d_stop)
        break;
      goal_index = static_cast<int>(rng.bounded(object_count));
      start_index = static_cast<int>(rng.bounded(homes.size()));
    }

    const Viewpoint& start =
        scene.viewpoints[start_index % scene.viewpoints.size()];
    ep.start_viewpoint = start.id;
    ep.goal_object = goal->label;
    ep.goal_position = goal->position;

    // Home viewpoint of the goal object: the closest one.
    const Viewpoint* home = &scene.viewpoints[0];
    for (const Viewpoint& v : scene.viewpoints) {
      if (distance(v.position, goal->position) <
          distance(home->position, goal->position))
        home = &v;
    }
    ep.gold_path = dijkstra_path(scene, start.id, home->id);

    Route route;
    route.id = "route_" + std::to_string(params.seed) + "_" + std::to_string(k);
    std::string prev;
    for (const ViewpointId& vid : ep.gold_path) {
      const Vec3 pos = scene.viewpoint_or_throw(vid).position;
      // Nearest object completable from this viewpoint (within d_sub would
      // be ideal; within 1.2 keeps a margin under the default).
      const SceneObject* best = nullptr;
      double best_d = 1.2;
      for (const SceneObject& o : scene.objects) {
        double d = distance(o.position, pos);
        if (d < best_d) {
          best_d = d;
          best = &o;
        }
      }
      if (!best || best->label == prev || best->label == goal->label) continue;
      RouteStep step;
      step.object = best->label;
      step.skill = Skill::approach;
      step.neighborhood = labels_near(scene, pos, params.r_sense);
      route.steps.push_back(step);
      prev = best->label;
    }
    RouteStep final_step;
    final_step.object = goal->label;
    final_step.skill = Skill::approach;
    final_step.neighborhood = labels_near(scene, goal->position, params.r_sense);
    route.steps.push_back(final_step);
    ep.route_id = route.id;

    std::string hint =
        route.steps.size() > 1 ? route.steps.front().object : "";
    ep.instruction = hint.empty()
                         ? "Go to the " + ep.goal_object + "."
                         : "Head past the " + hint + ", then reach the " +
                               ep.goal_object + ".";

    scene.routes.push_back(std::move(route));
    out.suite.episodes.push_back(std::move(ep));
  }

  // Re-index so the appended routes are resolvable.
  scene.validate_and_index();
  for (const Episode& ep : out.suite.episodes) validate_episode(scene, ep);
  return out;
}

std::vector<GeneratedScene> generate_suite(const GenParams& params, int count) {
  if (count < 1)
    throw NavError(ErrorCode::config_error, "scene count must be positive");
  std::vector<GeneratedScene> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    GenParams p = params;
    p.seed = params.seed + static_cast<std::uint64_t>(i);
    out.push_back(generate_scene(p));
  }
  return out;
}

}  // namespace sfnav
