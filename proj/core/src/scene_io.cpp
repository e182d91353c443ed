#include "sfnav/scene_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sfnav/errors.hpp"
#include "sfnav/report.hpp"

namespace sfnav {

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

[[noreturn]] void parse_fail(const std::string& origin, const std::string& what) {
  throw NavError(ErrorCode::scene_error, origin + ": " + what);
}

// Strict field access: every object must carry exactly the expected keys.
void check_keys(const json& node, std::initializer_list<const char*> required,
                std::initializer_list<const char*> optional,
                const std::string& origin, const std::string& where) {
  for (const char* key : required) {
    if (!node.contains(key))
      parse_fail(origin, where + " is missing field \"" + key + "\"");
  }
  for (auto it = node.begin(); it != node.end(); ++it) {
    bool known = false;
    for (const char* key : required)
      if (it.key() == key) known = true;
    for (const char* key : optional)
      if (it.key() == key) known = true;
    if (!known)
      parse_fail(origin, where + " has unknown field \"" + it.key() + "\"");
  }
}

Vec3 parse_vec(const json& node, const std::string& origin,
               const std::string& where) {
  if (!node.is_array() || node.size() != 3)
    parse_fail(origin, where + " must be a 3-element array");
  for (const auto& v : node)
    if (!v.is_number()) parse_fail(origin, where + " must hold numbers");
  return Vec3{node[0].get<double>(), node[1].get<double>(),
              node[2].get<double>()};
}

json vec_to_json(const Vec3& v) {
  return json::array({v.x, v.y, v.z});
}

void check_schema_version(const json& root, const std::string& origin) {
  if (!root.contains("schema_version"))
    parse_fail(origin, "missing schema_version");
  if (!root["schema_version"].is_number_integer() ||
      root["schema_version"].get<int>() != kSchemaVersion)
    parse_fail(origin, "unsupported schema_version (expected " +
                           std::to_string(kSchemaVersion) + ")");
}

json parse_root(const std::string& text, const std::string& origin) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) parse_fail(origin, "not valid JSON");
  if (!root.is_object()) parse_fail(origin, "top level must be an object");
  return root;
}

}  // namespace

Scene parse_scene_json(const std::string& text, const std::string& origin) {
  json root = parse_root(text, origin);
  check_keys(root,
             {"schema_version", "name", "viewpoints", "edges", "objects"},
             {"routes"}, origin, "scene");
  check_schema_version(root, origin);

  Scene scene;
  scene.name = root["name"].get<std::string>();

  for (const auto& node : root["viewpoints"]) {
    check_keys(node, {"id", "position"}, {}, origin, "viewpoint");
    Viewpoint v;
    v.id = node["id"].get<std::string>();
    v.position = parse_vec(node["position"], origin, "viewpoint position");
    scene.viewpoints.push_back(std::move(v));
  }
  for (const auto& node : root["edges"]) {
    check_keys(node, {"a", "b"}, {"weight"}, origin, "edge");
    Scene::Edge e;
    e.a = node["a"].get<std::string>();
    e.b = node["b"].get<std::string>();
    if (node.contains("weight")) e.weight = node["weight"].get<double>();
    scene.edges.push_back(std::move(e));
  }
  for (const auto& node : root["objects"]) {
    check_keys(node, {"label", "position"}, {}, origin, "object");
    SceneObject o;
    o.label = node["label"].get<std::string>();
    o.position = parse_vec(node["position"], origin, "object position");
    scene.objects.push_back(std::move(o));
  }
  if (root.contains("routes")) {
    for (const auto& node : root["routes"]) {
      check_keys(node, {"id", "steps"}, {}, origin, "route");
      Route r;
      r.id = node["id"].get<std::string>();
      for (const auto& snode : node["steps"]) {
        check_keys(snode, {"object", "skill", "neighborhood"}, {}, origin,
                   "route step");
        RouteStep s;
        s.object = snode["object"].get<std::string>();
        auto skill = parse_skill(snode["skill"].get<std::string>());
        if (!skill)
          parse_fail(origin, "route \"" + r.id + "\" has unknown skill \"" +
                                 snode["skill"].get<std::string>() + "\"");
        s.skill = *skill;
        for (const auto& nb : snode["neighborhood"])
          s.neighborhood.push_back(nb.get<std::string>());
        r.steps.push_back(std::move(s));
      }
      scene.routes.push_back(std::move(r));
    }
  }

  try {
    scene.validate_and_index();
  } catch (const NavError& e) {
    parse_fail(origin, e.what());
  }
  return scene;
}

EpisodeSuite parse_episodes_json(const std::string& text,
                                 const std::string& origin) {
  json root = parse_root(text, origin);
  check_keys(root, {"schema_version", "scene_name", "episodes"}, {}, origin,
             "episode suite");
  check_schema_version(root, origin);

  EpisodeSuite suite;
  suite.scene_name = root["scene_name"].get<std::string>();
  for (const auto& node : root["episodes"]) {
    check_keys(node,
               {"id", "instruction", "start_viewpoint", "goal_object",
                "goal_position"},
               {"gold_path", "route_id"}, origin, "episode");
    Episode e;
    e.id = node["id"].get<std::string>();
    e.instruction = node["instruction"].get<std::string>();
    e.start_viewpoint = node["start_viewpoint"].get<std::string>();
    e.goal_object = normalize_label(node["goal_object"].get<std::string>());
    e.goal_position = parse_vec(node["goal_position"], origin, "goal position");
    if (node.contains("gold_path"))
      for (const auto& vp : node["gold_path"])
        e.gold_path.push_back(vp.get<std::string>());
    if (node.contains("route_id")) e.route_id = node["route_id"].get<std::string>();
    suite.episodes.push_back(std::move(e));
  }
  return suite;
}

std::string scene_to_json(const Scene& scene) {
  json root;
  root["schema_version"] = kSchemaVersion;
  root["name"] = scene.name;
  root["viewpoints"] = json::array();
  for (const Viewpoint& v : scene.viewpoints) {
    json node;
    node["id"] = v.id;
    node["position"] = vec_to_json(v.position);
    root["viewpoints"].push_back(std::move(node));
  }
  root["edges"] = json::array();
  for (const Scene::Edge& e : scene.edges) {
    json node;
    node["a"] = e.a;
    node["b"] = e.b;
    node["weight"] = e.weight;
    root["edges"].push_back(std::move(node));
  }
  root["objects"] = json::array();
  for (const SceneObject& o : scene.objects) {
    json node;
    node["label"] = o.label;
    node["position"] = vec_to_json(o.position);
    root["objects"].push_back(std::move(node));
  }
  root["routes"] = json::array();
  for (const Route& r : scene.routes) {
    json node;
    node["id"] = r.id;
    node["steps"] = json::array();
    for (const RouteStep& s : r.steps) {
      json snode;
      snode["object"] = s.object;
      snode["skill"] = to_string(s.skill);
      snode["neighborhood"] = s.neighborhood;
      node["steps"].push_back(std::move(snode));
    }
    root["routes"].push_back(std::move(node));
  }
  return root.dump(2) + "\n";
}

std::string episodes_to_json(const EpisodeSuite& suite) {
  json root;
  root["schema_version"] = kSchemaVersion;
  root["scene_name"] = suite.scene_name;
  root["episodes"] = json::array();
  for (const Episode& e : suite.episodes) {
    json node;
    node["id"] = e.id;
    node["instruction"] = e.instruction;
    node["start_viewpoint"] = e.start_viewpoint;
    node["goal_object"] = e.goal_object;
    node["goal_position"] = vec_to_json(e.goal_position);
    if (!e.gold_path.empty()) node["gold_path"] = e.gold_path;
    if (!e.route_id.empty()) node["route_id"] = e.route_id;
    root["episodes"].push_back(std::move(node));
  }
  return root.dump(2) + "\n";
}

Scene load_scene(const std::string& path) {
  return parse_scene_json(read_text_file(path), path);
}

void save_scene(const Scene& scene, const std::string& path) {
  write_text_file(path, scene_to_json(scene));
}

EpisodeSuite load_episodes(const std::string& path) {
  return parse_episodes_json(read_text_file(path), path);
}

void save_episodes(const EpisodeSuite& suite, const std::string& path) {
  write_text_file(path, episodes_to_json(suite));
}

}  // namespace sfnav
