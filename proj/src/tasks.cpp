#include "warpdemo/tasks.hpp"

#include "warpdemo/rng.hpp"

namespace warpdemo {
namespace {

double planar_distance(const Vec3& a, const Vec3& b) { return (a - b).head<2>().norm(); }

Vec3 table_point(Rng& rng, const Workspace& ws, double z) {
  const double h = ws.half_side();
  const double x = rng.uniform(-h, h);
  const double y = rng.uniform(-h, h);
  return {x, y, z};
}

bool try_sample(TaskKind task, const Workspace& ws, Rng& rng, Scene& scene) {
  const double rest = ws.rest_height();
  const double min_sep = 2.0 * ws.block_size;
  scene.block_starts.clear();
  scene.block_goals.clear();

  switch (task) {
    case TaskKind::Push: {
      const Vec3 start = table_point(rng, ws, rest);
      const Vec3 goal = table_point(rng, ws, rest);
      if ((start - goal).norm() < min_sep) return false;
      scene.block_starts.push_back(start);
      scene.block_goals.push_back(goal);
      return true;
    }
    case TaskKind::PickPlace: {
      const Vec3 start = table_point(rng, ws, rest);
      Vec3 goal = table_point(rng, ws, 0.0);
      goal.z() = rng.uniform(ws.goal_z_min, ws.goal_z_max);
      if ((start - goal).norm() < min_sep) return false;
      scene.block_starts.push_back(start);
      scene.block_goals.push_back(goal);
      return true;
    }
    case TaskKind::Stack: {
      const Vec3 a = table_point(rng, ws, rest);
      const Vec3 b = table_point(rng, ws, rest);
      const Vec3 column = table_point(rng, ws, rest);
      if ((a - b).norm() < min_sep) return false;
      if (planar_distance(a, column) < min_sep || planar_distance(b, column) < min_sep) return false;
      scene.block_starts = {a, b};
      scene.block_goals = {column, column + Vec3(0.0, 0.0, ws.block_size)};
      return true;
    }
  }
  return false;
}

}  // namespace

double SuccessSpec::threshold(TaskKind task) const {
  switch (task) {
    case TaskKind::Push:
      return push;
    case TaskKind::PickPlace:
      return pick_place;
    case TaskKind::Stack:
      return stack;
  }
  return 0.0;
}

void SuccessSpec::validate() const {
  if (!(push > 0.0) || !(pick_place > 0.0) || !(stack > 0.0)) {
    throw ConfigError("success thresholds must be positive");
  }
}

Scene sample_scene(TaskKind task, const Workspace& ws, std::uint64_t seed) {
  ws.validate();
  Rng rng(seed);
  Scene scene;
  scene.task = task;
  scene.block_size = ws.block_size;
  scene.seed = seed;
  for (int attempt = 0; attempt <= kMaxSceneRejections; ++attempt) {
    if (try_sample(task, ws, rng, scene)) {
      return scene;
    }
  }
  throw SamplingExhausted("no valid " + std::string(to_string(task)) + " scene after " +
                          std::to_string(kMaxSceneRejections) + " rejections; workspace too small?");
}

Scene scene_from_demo(const DemoTrajectory& demo, const Workspace& ws) {
  Scene scene;
  scene.task = demo.task;
  scene.block_size = ws.block_size;
  for (const auto& seg : demo.segments) {
    scene.block_starts.push_back(seg.anchor_start);
    scene.block_goals.push_back(seg.anchor_goal);
  }
  return scene;
}

std::vector<AnchorPair> anchors_for_scene(TaskKind task, const DemoTrajectory& demo, const Scene& scene,
                                          const GeometryTolerances& tol) {
  const std::size_t n = block_count(task);
  if (demo.segments.size() != n) {
    throw SegmentMismatch(std::string(to_string(task)) + " expects " + std::to_string(n) +
                          " demo segments, got " + std::to_string(demo.segments.size()));
  }
  if (scene.block_starts.size() != n || scene.block_goals.size() != n) {
    throw SegmentMismatch("scene block count does not match task " + std::string(to_string(task)));
  }
  std::vector<AnchorPair> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    AnchorPair p{demo.segments[i].anchor_start, demo.segments[i].anchor_goal, scene.block_starts[i],
                 scene.block_goals[i]};
    if (!(p.recorded_delta().norm() > tol.min_length)) {
      throw ValidationError("segment " + std::to_string(i) + ": recorded anchors coincide", i);
    }
    if (!(p.generated_delta().norm() > tol.min_length)) {
      throw ValidationError("segment " + std::to_string(i) + ": generated start equals generated goal", i);
    }
    pairs.push_back(p);
  }
  return pairs;
}

bool success(TaskKind task, const SimState& final_state, const Scene& scene, const SuccessSpec& criteria) {
  const double thr = criteria.threshold(task);
  if (final_state.blocks.size() < scene.block_goals.size()) {
    return false;
  }
  for (std::size_t i = 0; i < scene.block_goals.size(); ++i) {
    if ((final_state.blocks[i].pos - scene.block_goals[i]).norm() > thr) {
      return false;
    }
  }
  return true;
}

SimState initial_state(const Scene& scene, const Workspace& ws) {
  SimState s;
  s.ee_pos = ws.ee_home;
  s.gripper = ws.g_max;
  for (const auto& p : scene.block_starts) {
    s.blocks.push_back({p, false});
  }
  return s;
}

}  // namespace warpdemo
