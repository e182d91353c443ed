#include "sfnav/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "sfnav/errors.hpp"

namespace sfnav {

std::string normalize_label(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool in_space = false;
  for (char c : raw) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isspace(u)) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(static_cast<char>(std::tolower(u)));
  }
  if (out.empty()) {
    throw NavError(ErrorCode::empty_label,
                   "label is empty after normalization: \"" +
                       std::string(raw) + "\"");
  }
  return out;
}

bool PerceivedGraph::contains(std::string_view label) const {
  return find(label) != nullptr;
}

const PerceivedObject* PerceivedGraph::find(std::string_view label) const {
  for (const auto& o : objects) {
    if (o.node.label == label) return &o;
  }
  return nullptr;
}

bool ImaginedGraph::contains(std::string_view label) const {
  return std::any_of(expected.begin(), expected.end(),
                     [&](const Expected& e) { return e.label == label; });
}

PerceivedGraph build_perceived_graph(std::span<const Detection> observation,
                                     int timestep,
                                     std::vector<std::string>* warnings) {
  PerceivedGraph graph;
  graph.timestep = timestep;

  // Nearest instance wins when a label is detected more than once.
  std::map<std::string, PerceivedObject> by_label;
  for (const Detection& d : observation) {
    std::string label = normalize_label(d.label);
    PerceivedObject obj;
    obj.node.label = label;
    obj.node.position = d.relative_position;
    obj.node.last_seen = timestep;
    obj.edge.distance = d.relative_position.norm();
    obj.edge.bearing = std::atan2(d.relative_position.y, d.relative_position.x);
    auto [it, inserted] = by_label.emplace(std::move(label), obj);
    if (!inserted) {
      if (warnings) {
        warnings->push_back("duplicate detection for \"" + it->first +
                            "\" at t=" + std::to_string(timestep) +
                            ", keeping nearest");
      }
      if (obj.edge.distance < it->second.edge.distance) it->second = obj;
    }
  }

  graph.objects.reserve(by_label.size());
  for (auto& [label, obj] : by_label) graph.objects.push_back(std::move(obj));
  std::sort(graph.objects.begin(), graph.objects.end(),
            [](const PerceivedObject& a, const PerceivedObject& b) {
              if (a.edge.distance != b.edge.distance)
                return a.edge.distance < b.edge.distance;
              return a.node.label < b.node.label;
            });
  return graph;
}

void append_history(GraphHistory& history, PerceivedGraph graph) {
  if (!history.perceived.empty() &&
      graph.timestep <= history.perceived.back().timestep) {
    throw NavError(ErrorCode::out_of_order,
                   "perceived timestep " + std::to_string(graph.timestep) +
                       " not after " +
                       std::to_string(history.perceived.back().timestep));
  }
  history.perceived.push_back(std::move(graph));
}

void append_history(GraphHistory& history, ImaginedGraph graph) {
  if (!history.imagined.empty() &&
      graph.timestep <= history.imagined.back().timestep) {
    throw NavError(ErrorCode::out_of_order,
                   "imagined timestep " + std::to_string(graph.timestep) +
                       " not after " +
                       std::to_string(history.imagined.back().timestep));
  }
  history.imagined.push_back(std::move(graph));
}

}  // namespace sfnav
