#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "warpdemo/common.hpp"
#include "warpdemo/sim_state.hpp"
#include "warpdemo/tasks.hpp"
#include "warpdemo/trajectory.hpp"

namespace warpdemo {

struct ControllerConfig {
  double gain = 5.0;                    // 1/s
  double max_speed = 0.5;               // m/s
  double max_gripper_speed = 0.2;       // m/s
  double dt = 0.05;                     // s
  double waypoint_advance_radius = 0.01;  // m
  double gripper_advance_tolerance = 0.005;  // m
  double waypoint_timeout = 2.0;        // s
  double settle_time = 0.5;             // s

  void validate() const;
  int timeout_steps() const;
  int settle_steps() const;
};

/// Kinematic stand-in for contact: a closing gripper captures the nearest block
/// inside a box around the fingers, an opening gripper lets it drop.
struct GraspModel {
  double capture_radius_xy = 0.02;
  double capture_radius_z = 0.02;
  double block_size = 0.04;  // close below this width, release at or above it

  void validate() const;
};

/// Advance the simulation by one control period.
SimState step(const SimState& state, const Action& action, const ControllerConfig& cfg,
              const GraspModel& grasp = {});

/// Height at which an unheld block at `pos` comes to rest, given the other blocks.
double support_height(const SimState& state, std::size_t block, double block_size);

struct StepRecord {
  double time = 0.0;
  Vec3 ee_pos = Vec3::Zero();
  double gripper = 0.0;
  std::vector<Vec3> block_pos;
  std::vector<bool> block_held;
  Action action;
};

struct Provenance {
  std::uint64_t scene_seed = 0;
  std::vector<AnchorPair> anchors;
  std::vector<AffineTransform> transforms;
};

struct EpisodeRecord {
  TaskKind task = TaskKind::PickPlace;
  std::vector<StepRecord> steps;
  SimState final_state;
  std::vector<Vec3> goals;
  bool success = false;
  Provenance provenance;
  // Campaign attempt index; -1 outside campaigns.
  long long attempt = -1;
};

StepRecord record_step(const SimState& state, const Action& action);

struct ReplayOptions {
  ControllerConfig controller;
  GraspModel grasp;
  SuccessSpec success;
  Workspace workspace;
};

/// Proportional-controller playback of a (warped) trajectory in `scene`.
/// Waypoints are consumed in order, one per step at most, when the ee is within
/// the advance radius and the gripper within tolerance, or after the timeout.
EpisodeRecord replay(const DemoTrajectory& trajectory, const Scene& scene, const ReplayOptions& opts = {});

nlohmann::json controller_to_json(const ControllerConfig& c);
nlohmann::json grasp_to_json(const GraspModel& g);

}  // namespace warpdemo
