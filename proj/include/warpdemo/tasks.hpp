#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "warpdemo/common.hpp"
#include "warpdemo/sim_state.hpp"
#include "warpdemo/trajectory.hpp"

namespace warpdemo {

/// Randomized initial condition: where each block starts and where it must end up.
/// Block i is the block manipulated by demo segment i.
struct Scene {
  TaskKind task = TaskKind::PickPlace;
  std::vector<Vec3> block_starts;
  std::vector<Vec3> block_goals;
  double block_size = 0.04;
  std::uint64_t seed = 0;
};

struct SuccessSpec {
  double push = 0.05;
  double pick_place = 0.05;
  double stack = 0.04;  // applied to every block

  double threshold(TaskKind task) const;
  void validate() const;
};

class SamplingExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SegmentMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxSceneRejections = 1000;

/// Deterministic in (task, ws, seed). Starts rest on the table and keep at
/// least two block widths from each other and from every goal column.
Scene sample_scene(TaskKind task, const Workspace& ws, std::uint64_t seed);

/// The scene the demo itself was recorded in, rebuilt from its segment anchors.
Scene scene_from_demo(const DemoTrajectory& demo, const Workspace& ws = {});

std::vector<AnchorPair> anchors_for_scene(TaskKind task, const DemoTrajectory& demo, const Scene& scene,
                                          const GeometryTolerances& tol = {});

bool success(TaskKind task, const SimState& final_state, const Scene& scene, const SuccessSpec& criteria = {});

/// Initial simulator state: ee at home with the gripper open, blocks at rest.
SimState initial_state(const Scene& scene, const Workspace& ws);

}  // namespace warpdemo
