#include "warpdemo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace warpdemo {

void ControllerConfig::validate() const {
  if (!(gain > 0.0) || !(max_speed > 0.0) || !(max_gripper_speed > 0.0) || !(dt > 0.0) ||
      !(waypoint_advance_radius > 0.0) || !(gripper_advance_tolerance > 0.0) || !(waypoint_timeout > 0.0) ||
      !(settle_time >= 0.0)) {
    throw ConfigError("controller parameters must be positive");
  }
  if (!(gain * dt < 2.0)) {
    throw ConfigError("controller is unstable: gain * dt must be below 2");
  }
}

int ControllerConfig::timeout_steps() const {
  return std::max(1, static_cast<int>(std::ceil(waypoint_timeout / dt - 1e-9)));
}

int ControllerConfig::settle_steps() const {
  return static_cast<int>(std::ceil(settle_time / dt - 1e-9));
}

void GraspModel::validate() const {
  if (!(capture_radius_xy > 0.0) || !(capture_radius_z > 0.0) || !(block_size > 0.0)) {
    throw ConfigError("grasp radii and block size must be positive");
  }
}

double support_height(const SimState& state, std::size_t block, double block_size) {
  const Vec3& p = state.blocks[block].pos;
  double height = 0.5 * block_size;
  for (std::size_t j = 0; j < state.blocks.size(); ++j) {
    if (j == block || state.blocks[j].held) continue;
    const Vec3& q = state.blocks[j].pos;
    const bool overlaps = std::abs(p.x() - q.x()) < block_size && std::abs(p.y() - q.y()) < block_size;
    if (overlaps && q.z() < p.z()) {
      height = std::max(height, q.z() + block_size);
    }
  }
  return height;
}

SimState step(const SimState& state, const Action& action, const ControllerConfig& cfg, const GraspModel& grasp) {
  SimState next = state;

  Vec3 velocity = cfg.gain * (action.pos - state.ee_pos);
  const double speed = velocity.norm();
  if (speed > cfg.max_speed) {
    velocity *= cfg.max_speed / speed;
  }
  next.ee_pos = state.ee_pos + velocity * cfg.dt;

  const double max_dg = cfg.max_gripper_speed * cfg.dt;
  next.gripper = state.gripper + std::clamp(action.gripper - state.gripper, -max_dg, max_dg);
  next.time = state.time + cfg.dt;

  const auto held = state.held_block();
  if (!held && state.gripper >= grasp.block_size && next.gripper < grasp.block_size) {
    std::size_t best = next.blocks.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < next.blocks.size(); ++i) {
      const Vec3 d = next.blocks[i].pos - next.ee_pos;
      if (d.head<2>().norm() <= grasp.capture_radius_xy && std::abs(d.z()) <= grasp.capture_radius_z &&
          d.norm() < best_dist) {
        best = i;
        best_dist = d.norm();
      }
    }
    if (best < next.blocks.size()) {
      next.blocks[best].held = true;
      next.grasp_offset = next.blocks[best].pos - next.ee_pos;
    }
  } else if (held && next.gripper >= grasp.block_size) {
    next.blocks[*held].held = false;
    next.blocks[*held].pos = next.ee_pos + state.grasp_offset;
    next.blocks[*held].pos.z() = support_height(next, *held, grasp.block_size);
    next.grasp_offset = Vec3::Zero();
    return next;
  }

  if (auto h = next.held_block()) {
    next.blocks[*h].pos = next.ee_pos + next.grasp_offset;
  }
  return next;
}

StepRecord record_step(const SimState& state, const Action& action) {
  StepRecord r;
  r.time = state.time;
  r.ee_pos = state.ee_pos;
  r.gripper = state.gripper;
  r.block_pos.reserve(state.blocks.size());
  r.block_held.reserve(state.blocks.size());
  for (const auto& b : state.blocks) {
    r.block_pos.push_back(b.pos);
    r.block_held.push_back(b.held);
  }
  r.action = action;
  return r;
}

EpisodeRecord replay(const DemoTrajectory& trajectory, const Scene& scene, const ReplayOptions& opts) {
  const auto& cfg = opts.controller;
  EpisodeRecord rec;
  rec.task = scene.task;
  rec.goals = scene.block_goals;
  rec.provenance.scene_seed = scene.seed;

  SimState state = initial_state(scene, opts.workspace);
  const auto& wps = trajectory.waypoints;
  if (wps.empty()) {
    rec.final_state = state;
    rec.success = success(scene.task, state, scene, opts.success);
    return rec;
  }

  const int timeout = cfg.timeout_steps();
  const int settle = cfg.settle_steps();
  std::size_t active = 0;
  int steps_on_waypoint = 0;
  int settle_left = -1;  // counts down once the final waypoint is done

  while (true) {
    const Waypoint& wp = wps[active];
    const Action action{wp.position, wp.gripper};
    rec.steps.push_back(record_step(state, action));
    state = step(state, action, cfg, opts.grasp);
    ++steps_on_waypoint;

    if (settle_left >= 0) {
      if (--settle_left <= 0) break;
      continue;
    }
    const bool reached = (state.ee_pos - wp.position).norm() <= cfg.waypoint_advance_radius &&
                         std::abs(state.gripper - wp.gripper) <= cfg.gripper_advance_tolerance;
    if (reached || steps_on_waypoint >= timeout) {
      if (active + 1 < wps.size()) {
        ++active;
        steps_on_waypoint = 0;
      } else {
        settle_left = settle;
        if (settle_left <= 0) break;
      }
    }
  }

  rec.final_state = state;
  rec.success = success(scene.task, state, scene, opts.success);
  return rec;
}

nlohmann::json controller_to_json(const ControllerConfig& c) {
  return {{"gain", c.gain},
          {"max_speed", c.max_speed},
          {"max_gripper_speed", c.max_gripper_speed},
          {"dt", c.dt},
          {"waypoint_advance_radius", c.waypoint_advance_radius},
          {"gripper_advance_tolerance", c.gripper_advance_tolerance},
          {"waypoint_timeout", c.waypoint_timeout},
          {"settle_time", c.settle_time}};
}

nlohmann::json grasp_to_json(const GraspModel& g) {
  return {{"capture_radius_xy", g.capture_radius_xy},
          {"capture_radius_z", g.capture_radius_z},
          {"block_size", g.block_size}};
}

}  // namespace warpdemo
