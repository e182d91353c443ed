#pragma once

#include <cstdint>
#include <vector>

#include "sfnav/scene.hpp"

namespace sfnav {

// Procedural scene family used by the test suites: a jittered grid of
// viewpoints with a fraction of edges deleted (connectivity preserved),
// objects scattered near viewpoints, and one annotated route per episode.
struct GenParams {
  std::uint64_t seed = 0;
  int grid_w = 4;
  int grid_h = 4;
  double spacing = 3.0;        // grid pitch in meters
  double jitter = 0.4;         // max per-axis viewpoint offset
  double edge_drop = 0.2;      // fraction of grid edges removed
  int objects_per_scene = 10;  // >= 2
  int episodes_per_scene = 2;
  double r_sense = 5.0;  // used to derive route neighborhoods
  double d_stop = 3.0;   // goal placement constraint
};

struct GeneratedScene {
  Scene scene;
  EpisodeSuite suite;
};

// Deterministic: equal params give byte-identical scenes across runs and
// platforms (all randomness drawn via the local RNG helpers).
GeneratedScene generate_scene(const GenParams& params);

// Convenience: `count` scenes with seeds seed, seed+1, ...
std::vector<GeneratedScene> generate_suite(const GenParams& params, int count);

}  // namespace sfnav
