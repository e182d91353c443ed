#pragma once

#include <string>

#include "sfnav/scene.hpp"

namespace sfnav {

// JSON round-trip for scenes and episode suites. Writers emit sorted keys and
// shortest round-trip floats so identical inputs produce identical bytes.
Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);

EpisodeSuite load_episodes(const std::string& path);
void save_episodes(const EpisodeSuite& suite, const std::string& path);

Scene parse_scene_json(const std::string& text, const std::string& origin);
EpisodeSuite parse_episodes_json(const std::string& text,
                                 const std::string& origin);
std::string scene_to_json(const Scene& scene);
std::string episodes_to_json(const EpisodeSuite& suite);

}  // namespace sfnav
