// Microbenchmarks for the per-step hot path (alignment bridge, path oracle)
// and the full episode loop.

#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "sfnav/alignment.hpp"
#include "sfnav/backends.hpp"
#include "sfnav/rng.hpp"
#include "sfnav/runner.hpp"
#include "sfnav/scene_gen.hpp"

namespace {

using namespace sfnav;

PerceivedGraph perceived_graph(int t, const std::vector<std::string>& labels) {
  std::vector<Detection> detections;
  double x = 1.0;
  for (const std::string& label : labels) {
    detections.push_back(Detection{label, Vec3{x, 0.0, 0.0}});
    x += 0.5;
  }
  return build_perceived_graph(detections, t);
}

ImaginedGraph imagined_graph(int t, const std::vector<std::string>& labels) {
  ImaginedGraph g;
  g.timestep = t;
  for (const std::string& label : labels)
    g.expected.push_back(ImaginedGraph::Expected{label, std::nullopt});
  return g;
}

// Random history with a shared anchor label at every timestep so the input
// is never degenerate.
GraphHistory synthetic_history(int steps, int pool) {
  Rng rng(7);
  GraphHistory history;
  for (int t = 1; t <= steps; ++t) {
    std::vector<std::string> seen{"obj0"};
    std::vector<std::string> expected{"obj0"};
    for (int o = 1; o < pool; ++o) {
      const std::string label = "obj" + std::to_string(o);
      if (rng.unit() < 0.5) seen.push_back(label);
      if (rng.unit() < 0.5) expected.push_back(label);
    }
    append_history(history, perceived_graph(t, seen));
    append_history(history, imagined_graph(t, expected));
  }
  return history;
}

void bm_compute_pq(benchmark::State& state) {
  const GraphHistory history =
      synthetic_history(static_cast<int>(state.range(0)), 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_pq(history));
  }
}
BENCHMARK(bm_compute_pq)->Arg(4)->Arg(16)->Arg(64);

void bm_confidence(benchmark::State& state) {
  const GraphHistory history =
      synthetic_history(static_cast<int>(state.range(0)), 8);
  BridgeOptions opts;
  for (auto _ : state) {
    benchmark::DoNotOptimize(confidence(history, opts));
  }
}
BENCHMARK(bm_confidence)->Arg(4)->Arg(16)->Arg(64);

void bm_shortest_path(benchmark::State& state) {
  GenParams params;
  params.seed = 21;
  params.grid_w = static_cast<int>(state.range(0));
  params.grid_h = static_cast<int>(state.range(0));
  params.objects_per_scene = 10;
  params.episodes_per_scene = 1;
  const GeneratedScene gen = generate_scene(params);
  const Episode& ep = gen.suite.episodes[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(shortest_path_length(
        gen.scene, ep.start_viewpoint, ep.goal_position, 3.0));
  }
}
BENCHMARK(bm_shortest_path)->Arg(4)->Arg(8)->Arg(16);

void bm_run_episode(benchmark::State& state) {
  GenParams params;
  params.seed = 33;
  params.grid_w = 4;
  params.grid_h = 4;
  params.objects_per_scene = 8;
  params.episodes_per_scene = 1;
  const GeneratedScene gen = generate_scene(params);
  RunConfig config;
  BackendFactory factory = [&gen](const Episode&) {
    return std::make_shared<OraclePlannerBackend>(gen.scene, gen.suite);
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_batch(gen.scene, gen.suite, factory, config));
  }
}
BENCHMARK(bm_run_episode);

}  // namespace

BENCHMARK_MAIN();
