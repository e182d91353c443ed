#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "sfnav/navigator.hpp"
#include "test_support.hpp"

using namespace sfnav;
using sfnav_test::nav_error_code;

namespace {

// Hub-and-spoke scene: "c" at the origin connected to every named spoke.
Scene star_scene(std::vector<std::pair<ViewpointId, Vec3>> spokes) {
  Scene scene;
  scene.name = "star";
  scene.viewpoints.push_back({"c", {0.0, 0.0, 0.0}});
  for (auto& [id, pos] : spokes) {
    scene.viewpoints.push_back({id, pos});
    scene.edges.push_back({"c", id, 0.0});  // weight filled from positions
  }
  scene.validate_and_index();
  return scene;
}

NavState state_at(ViewpointId viewpoint, std::string target, Skill skill) {
  NavState state;
  state.viewpoint = viewpoint;
  state.last_visit[state.viewpoint] = 0;
  Subgoal sg;
  sg.target = std::move(target);
  sg.skill = skill;
  sg.imagined_objects = {sg.target};
  state.chain.goal = sg.target;
  state.chain.subgoals = {sg};
  state.chain_cursor = 0;
  return state;
}

// Graph whose single object sits at `rel` from the agent.
PerceivedGraph seen_at(const std::string& label, Vec3 rel) {
  std::vector<Detection> obs = {{label, rel}};
  return build_perceived_graph(obs, 1);
}

}  // namespace

TEST_CASE("subgoal_reached needs visibility within the completion radius") {
  Subgoal sg;
  sg.target = "plant";
  CHECK(subgoal_reached(seen_at("plant", {1.2, 0.0, 0.0}), sg, 1.5));
  CHECK(subgoal_reached(seen_at("plant", {1.5, 0.0, 0.0}), sg, 1.5));
  CHECK_FALSE(subgoal_reached(seen_at("plant", {2.0, 0.0, 0.0}), sg, 1.5));
  CHECK_FALSE(subgoal_reached(seen_at("rock", {0.1, 0.0, 0.0}), sg, 1.5));
}

TEST_CASE("approach moves to the neighbor nearest the target") {
  Scene scene = star_scene({{"a", {1.0, 0.0, 0.0}}, {"b", {-1.0, 0.0, 0.0}}});
  NavState state = state_at("c", "plant", Skill::approach);
  Action action = select_action(scene, state, seen_at("plant", {2.0, 0.0, 0.0}));
  REQUIRE(action.type == Action::Type::move_to);
  CHECK(action.target == "a");
}

TEST_CASE("approach breaks exact ties by viewpoint id") {
  Scene scene = star_scene({{"b", {0.0, 1.0, 0.0}}, {"a", {0.0, -1.0, 0.0}}});
  NavState state = state_at("c", "plant", Skill::approach);
  // Target dead ahead on x: both neighbors are equally far from it.
  Action action = select_action(scene, state, seen_at("plant", {2.0, 0.0, 0.0}));
  CHECK(action.target == "a");
}

TEST_CASE("through maximizes progress along the target direction") {
  // "na" is closer to the target but behind it; "nb" presses past it.
  Scene scene =
      star_scene({{"na", {0.5, 0.8, 0.0}}, {"nb", {2.0, 0.0, 0.0}}});
  NavState through = state_at("c", "door", Skill::through);
  CHECK(select_action(scene, through, seen_at("door", {1.0, 0.0, 0.0}))
            .target == "nb");
  NavState approach = state_at("c", "door", Skill::approach);
  CHECK(select_action(scene, approach, seen_at("door", {1.0, 0.0, 0.0}))
            .target == "na");
}

TEST_CASE("through degrades to the id tie when standing on the target") {
  Scene scene =
      star_scene({{"q", {1.0, 0.0, 0.0}}, {"p", {0.0, 1.0, 0.0}}});
  NavState state = state_at("c", "door", Skill::through);
  // Zero direction vector: every projection is zero, lowest id wins.
  CHECK(select_action(scene, state, seen_at("door", {0.0, 0.0, 0.0}))
            .target == "p");
}

TEST_CASE("go_up climbs, go_down descends, ties broken by target distance") {
  Scene scene = star_scene({
      {"flat", {1.0, 0.0, 0.0}},
      {"roof", {0.0, 1.0, 3.0}},
      {"pit", {0.0, -1.0, -2.0}},
  });
  NavState up = state_at("c", "stairs", Skill::go_up);
  CHECK(select_action(scene, up, seen_at("stairs", {3.0, 0.0, 0.0})).target ==
        "roof");
  NavState down = state_at("c", "stairs", Skill::go_down);
  CHECK(select_action(scene, down, seen_at("stairs", {3.0, 0.0, 0.0})).target ==
        "pit");

  // Equal climbs: the one nearer the target wins.
  Scene tied = star_scene({
      {"far", {-1.0, 0.0, 1.0}},
      {"near", {1.0, 0.0, 1.0}},
  });
  NavState state = state_at("c", "stairs", Skill::go_up);
  CHECK(select_action(tied, state, seen_at("stairs", {3.0, 0.0, 0.0})).target ==
        "near");
}

TEST_CASE("no subgoal or unseen target falls back to exploration") {
  Scene scene = star_scene({{"a", {1.0, 0.0, 0.0}}, {"b", {0.0, 1.0, 0.0}}});

  // Unvisited neighbors beat visited ones.
  NavState state = state_at("c", "ghost", Skill::approach);
  state.last_visit["a"] = 1;
  PerceivedGraph empty_graph = build_perceived_graph(std::vector<Detection>{}, 1);
  CHECK(select_action(scene, state, empty_graph).target == "b");

  // No active subgoal at all behaves the same.
  NavState done = state_at("c", "ghost", Skill::approach);
  done.chain_cursor = 1;  // past the end
  done.last_visit["a"] = 1;
  CHECK(done.active_subgoal() == nullptr);
  CHECK(select_action(scene, done, empty_graph).target == "b");

  // Target not in view, even though a subgoal is active.
  NavState blind = state_at("c", "ghost", Skill::approach);
  blind.last_visit["b"] = 1;
  CHECK(select_action(scene, blind, seen_at("other", {1.0, 0.0, 0.0}))
            .target == "a");
}

TEST_CASE("exploration prefers the nearest unvisited neighbor") {
  Scene scene = star_scene({{"near", {1.0, 0.0, 0.0}},
                            {"far", {0.0, 3.0, 0.0}}});
  NavState state = state_at("c", "ghost", Skill::approach);
  PerceivedGraph empty_graph = build_perceived_graph(std::vector<Detection>{}, 1);
  CHECK(select_action(scene, state, empty_graph).target == "near");

  // Equal weights: lowest id.
  Scene even = star_scene({{"y", {1.0, 0.0, 0.0}}, {"x", {0.0, 1.0, 0.0}}});
  NavState fresh = state_at("c", "ghost", Skill::approach);
  CHECK(select_action(even, fresh, empty_graph).target == "x");
}

TEST_CASE("with everything visited, exploration picks the stalest neighbor") {
  Scene scene = star_scene({{"a", {1.0, 0.0, 0.0}}, {"b", {0.0, 1.0, 0.0}}});
  NavState state = state_at("c", "ghost", Skill::approach);
  state.last_visit["a"] = 4;
  state.last_visit["b"] = 2;
  PerceivedGraph empty_graph = build_perceived_graph(std::vector<Detection>{}, 1);
  CHECK(select_action(scene, state, empty_graph).target == "b");

  // Same entry step: lowest id.
  state.last_visit["a"] = 2;
  CHECK(select_action(scene, state, empty_graph).target == "a");
}

TEST_CASE("a neighborless viewpoint is a dead end") {
  Scene scene;
  scene.name = "solo";
  scene.viewpoints.push_back({"only", {0.0, 0.0, 0.0}});
  scene.validate_and_index();
  NavState state = state_at("only", "plant", Skill::approach);
  PerceivedGraph empty_graph = build_perceived_graph(std::vector<Detection>{}, 1);
  CHECK(nav_error_code([&] { select_action(scene, state, empty_graph); }) ==
        ErrorCode::dead_end);
}

TEST_CASE("select_action never stops on its own") {
  Scene scene = star_scene({{"a", {1.0, 0.0, 0.0}}});
  NavState state = state_at("c", "plant", Skill::approach);
  // Standing essentially on the target: still a move, never a stop.
  Action action =
      select_action(scene, state, seen_at("plant", {0.1, 0.0, 0.0}));
  CHECK(action.type == Action::Type::move_to);
}
