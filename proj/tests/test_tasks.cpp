#include <doctest.h>

#include <cmath>

#include "warpdemo/tasks.hpp"

using namespace warpdemo;

namespace {

const std::string kDemos = WARPDEMO_DATA_DIR "/demos/";

SimState at_positions(const std::vector<Vec3>& ps) {
  SimState s;
  for (const auto& p : ps) s.blocks.push_back({p, false});
  return s;
}

}  // namespace

TEST_CASE("task names") {
  for (auto t : {TaskKind::Push, TaskKind::PickPlace, TaskKind::Stack}) {
    CHECK(parse_task_kind(to_string(t)) == t);
  }
  CHECK_FALSE(parse_task_kind("lift").has_value());
  CHECK(block_count(TaskKind::Stack) == 2);
  CHECK(block_count(TaskKind::Push) == 1);
}

TEST_CASE("sample_scene is a pure function of its inputs") {
  const Workspace ws;
  for (auto t : {TaskKind::Push, TaskKind::PickPlace, TaskKind::Stack}) {
    const auto a = sample_scene(t, ws, 1234);
    const auto b = sample_scene(t, ws, 1234);
    CHECK(a.block_starts == b.block_starts);
    CHECK(a.block_goals == b.block_goals);
    CHECK(sample_scene(t, ws, 1235).block_starts != a.block_starts);
  }
}

TEST_CASE("push scenes are planar") {
  const Workspace ws;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto s = sample_scene(TaskKind::Push, ws, seed);
    CHECK(s.block_starts[0].z() == 0.02);
    CHECK(s.block_goals[0].z() == 0.02);
  }
}

TEST_CASE("10k pick-place scenes stay in bounds and separated") {
  const Workspace ws;
  double lo = 1.0, hi = -1.0, zlo = 1.0, zhi = -1.0, min_sep = 1.0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto s = sample_scene(TaskKind::PickPlace, ws, seed);
    for (const auto& p : {s.block_starts[0], s.block_goals[0]}) {
      lo = std::min({lo, p.x(), p.y()});
      hi = std::max({hi, p.x(), p.y()});
    }
    CHECK(s.block_starts[0].z() == ws.rest_height());
    zlo = std::min(zlo, s.block_goals[0].z());
    zhi = std::max(zhi, s.block_goals[0].z());
    min_sep = std::min(min_sep, (s.block_starts[0] - s.block_goals[0]).norm());
  }
  CHECK(lo >= -0.35);
  CHECK(hi <= 0.35);
  CHECK(lo < -0.34);  // the sampler actually reaches the edges
  CHECK(hi > 0.34);
  CHECK(zlo >= 0.0);
  CHECK(zhi <= 0.20);
  CHECK(min_sep >= 0.08);
}

TEST_CASE("stack scenes share a goal column") {
  const Workspace ws;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto s = sample_scene(TaskKind::Stack, ws, seed);
    REQUIRE(s.block_starts.size() == 2);
    CHECK(s.block_goals[0].z() == doctest::Approx(0.02));
    CHECK(s.block_goals[1].z() == doctest::Approx(0.06));
    CHECK(s.block_goals[0].head<2>() == s.block_goals[1].head<2>());
    CHECK((s.block_starts[0] - s.block_starts[1]).norm() >= 0.08);
  }
}

TEST_CASE("sample_scene gives up on a workspace that is too small") {
  Workspace tiny;
  tiny.side = 0.05;
  CHECK_THROWS_AS(sample_scene(TaskKind::Push, tiny, 1), SamplingExhausted);
}

TEST_CASE("anchors_for_scene") {
  const auto pick = load_demo(kDemos + "pick_place.json");
  const auto stack = load_demo(kDemos + "stack.json");
  const Workspace ws;

  const auto s1 = sample_scene(TaskKind::PickPlace, ws, 3);
  const auto a1 = anchors_for_scene(TaskKind::PickPlace, pick, s1);
  REQUIRE(a1.size() == 1);
  CHECK(a1[0].generated_start == s1.block_starts[0]);
  CHECK(a1[0].recorded_start == pick.segments[0].anchor_start);

  const auto s2 = sample_scene(TaskKind::Stack, ws, 3);
  const auto a2 = anchors_for_scene(TaskKind::Stack, stack, s2);
  REQUIRE(a2.size() == 2);
  CHECK(a2[1].generated_goal == s2.block_goals[1]);
  CHECK(a2[1].generated_goal.z() == doctest::Approx(0.06));

  CHECK_THROWS_AS(anchors_for_scene(TaskKind::Stack, pick, s2), SegmentMismatch);

  Scene degenerate = s1;
  degenerate.block_goals[0] = degenerate.block_starts[0];
  CHECK_THROWS_AS(anchors_for_scene(TaskKind::PickPlace, pick, degenerate), ValidationError);
}

TEST_CASE("success thresholds") {
  Scene scene;
  scene.block_goals = {Vec3(0.1, 0.1, 0.1)};
  const SuccessSpec criteria;
  CHECK(success(TaskKind::PickPlace, at_positions({Vec3(0.1, 0.1, 0.1)}), scene, criteria));
  CHECK(success(TaskKind::PickPlace, at_positions({Vec3(0.1 + 0.049, 0.1, 0.1)}), scene, criteria));
  CHECK_FALSE(success(TaskKind::PickPlace, at_positions({Vec3(0.1 + 0.051, 0.1, 0.1)}), scene, criteria));
  CHECK_FALSE(success(TaskKind::Push, at_positions({Vec3(0.1, 0.1 - 0.051, 0.1)}), scene, criteria));

  Scene stack;
  stack.block_goals = {Vec3(0, 0, 0.02), Vec3(0, 0, 0.06)};
  CHECK_FALSE(success(TaskKind::Stack, at_positions({Vec3(0.03, 0, 0.02), Vec3(0.05, 0, 0.06)}), stack, criteria));
  CHECK(success(TaskKind::Stack, at_positions({Vec3(0.03, 0, 0.02), Vec3(0.039, 0, 0.06)}), stack, criteria));
}

TEST_CASE("success is monotone in the block errors") {
  Scene scene;
  scene.block_goals = {Vec3(0, 0, 0.02), Vec3(0, 0, 0.06)};
  for (int i = 0; i <= 50; ++i) {
    const double e = 0.001 * i;
    const bool far = success(TaskKind::Stack, at_positions({Vec3(e, 0, 0.02), Vec3(0, e, 0.06)}), scene);
    const bool near = success(TaskKind::Stack, at_positions({Vec3(e / 2, 0, 0.02), Vec3(0, e / 2, 0.06)}), scene);
    CHECK((!far || near));
  }
}
