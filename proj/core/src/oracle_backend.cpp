#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "sfnav/backends.hpp"
#include "sfnav/errors.hpp"

namespace sfnav {

namespace {

// The oracle reads the same prompt a live model would see, so it needs the
// reached-subgoal list and the chosen decision back out of the text.
std::vector<std::string> parse_reached(const std::string& user_prompt) {
  std::vector<std::string> out;
  std::istringstream in(user_prompt);
  std::string line;
  const std::string marker = "Reached subgoals:";
  while (std::getline(in, line)) {
    if (line.compare(0, marker.size(), marker) != 0) continue;
    std::string rest = line.substr(marker.size());
    if (rest.find("(none)") != std::string::npos) return {};
    std::string entry;
    std::istringstream parts(rest);
    while (std::getline(parts, entry, ';')) {
      std::size_t a = entry.find_first_not_of(" \t");
      if (a == std::string::npos) continue;
      std::size_t b = entry.find_last_not_of(" \t");
      out.push_back(entry.substr(a, b - a + 1));
    }
    return out;
  }
  return out;
}

std::string parse_decision_target(const std::string& user_prompt) {
  std::istringstream in(user_prompt);
  std::string line;
  const std::string marker = "Chosen next decision: ";
  while (std::getline(in, line)) {
    if (line.compare(0, marker.size(), marker) != 0) continue;
    std::string rest = line.substr(marker.size());
    std::size_t bar = rest.find('|');
    if (bar == std::string::npos) return rest;
    std::size_t end = bar;
    while (end > 0 && rest[end - 1] == ' ') --end;
    return rest.substr(0, end);
  }
  return "";
}

long long synth_tokens(std::size_t chars, double rate) {
  return static_cast<long long>(
      std::ceil(static_cast<double>(chars) * rate));
}

}  // namespace

OraclePlannerBackend::OraclePlannerBackend(const Scene& scene,
                                           const EpisodeSuite& suite,
                                           OracleCosts costs)
    : scene_(scene), costs_(costs) {
  for (const Episode& e : suite.episodes) {
    EpisodeScript script;
    script.episode = &e;
    script.route = e.route_id.empty() ? nullptr : scene.find_route(e.route_id);
    scripts_[e.id] = script;
  }
}

const OraclePlannerBackend::EpisodeScript& OraclePlannerBackend::script_for(
    const std::string& episode_id) const {
  auto it = scripts_.find(episode_id);
  if (it == scripts_.end())
    throw NavError(ErrorCode::backend_error,
                   "oracle has no script for episode \"" + episode_id + "\"");
  return it->second;
}

BackendReply OraclePlannerBackend::respond(const PromptRequest& request) {
  const EpisodeScript& script = script_for(request.episode_id);
  const Episode& episode = *script.episode;

  std::string text;
  switch (request.stage) {
    case PromptStage::goal: {
      text = "GOAL: " + episode.goal_object + "\n";
      break;
    }
    case PromptStage::policy:
    case PromptStage::chain: {
      // Greedy cursor: each reached subgoal that matches the pending route
      // step advances it; anything else (fallback approaches, repeats) is
      // ignored.
      std::vector<std::string> reached = parse_reached(request.user);
      std::size_t cursor = 0;
      const std::vector<RouteStep>* steps =
          script.route ? &script.route->steps : nullptr;
      if (steps) {
        for (const std::string& label : reached) {
          if (cursor < steps->size() && (*steps)[cursor].object == label)
            ++cursor;
        }
      }
      const bool exhausted = !steps || cursor >= steps->size();

      if (request.stage == PromptStage::policy) {
        if (exhausted) {
          text = "The route is done; head for the goal.\nDECISION: " +
                 episode.goal_object + " | approach\n";
        } else {
          const RouteStep& next = (*steps)[cursor];
          text = "Continue along the annotated route.\nDECISION: " +
                 next.object + " | " + to_string(next.skill) + "\n";
        }
      } else {
        // Chain stage: emit the remaining route from the decision onward;
        // the caller clamps to its horizon.
        std::string decision = parse_decision_target(request.user);
        nlohmann::ordered_json array = nlohmann::ordered_json::array();
        if (!exhausted && decision == (*steps)[cursor].object) {
          for (std::size_t i = cursor; i < steps->size(); ++i) {
            nlohmann::ordered_json node;
            node["object"] = (*steps)[i].object;
            node["skill"] = to_string((*steps)[i].skill);
            node["imagined_objects"] = (*steps)[i].neighborhood;
            array.push_back(std::move(node));
          }
        } else {
          nlohmann::ordered_json node;
          node["object"] =
              decision.empty() ? episode.goal_object : decision;
          node["skill"] = "approach";
          node["imagined_objects"] =
              std::vector<std::string>{episode.goal_object};
          array.push_back(std::move(node));
        }
        text = "CHAIN: " + array.dump() + "\n";
      }
      break;
    }
  }

  BackendReply reply;
  reply.text = text;
  reply.usage.prompt_tokens = synth_tokens(
      request.system.size() + request.user.size(), costs_.prompt_tokens_per_char);
  reply.usage.completion_tokens =
      synth_tokens(text.size(), costs_.completion_tokens_per_char);
  reply.duration_s =
      costs_.seconds_per_token * static_cast<double>(reply.usage.total());
  return reply;
}

}  // namespace sfnav
