#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "warpdemo/ensembler.hpp"
#include "warpdemo/rng.hpp"
#include "warpdemo/sim.hpp"
#include "warpdemo/trajectory.hpp"

namespace warpdemo {

struct Observation {
  Vec3 ee_pos = Vec3::Zero();
  double gripper = 0.0;
};

struct TrackerConfig {
  std::size_t chunk_len = 20;
  std::size_t search_window = 12;
  double gripper_weight = 1.0;  // meters of position per meter of gripper width
  int stall_steps = 40;         // force the cursor forward after this many calls without progress
  // Controller the chunk rollout assumes; normally the simulator's own.
  ControllerConfig controller;

  void validate() const;
};

/// Perturbations that make consecutive chunks disagree.
struct DisturbanceConfig {
  int latency = 0;         // chunks are computed from the observation this many steps old
  int bimodal_period = 0;  // 0 disables; otherwise hypotheses alternate every this many chunks
  int bimodal_gap = 6;     // waypoints the late hypothesis lags behind around gripper events
  double noise = 0.0;      // uniform positional noise amplitude per axis, meters

  bool any() const { return latency > 0 || bimodal_period > 0 || noise > 0.0; }
  void validate() const;
};

/// Latency of 3 steps plus the two-hypothesis switcher flipping every 2 chunks.
inline DisturbanceConfig disturbance_suite() {
  DisturbanceConfig d;
  d.latency = 3;
  d.bimodal_period = 2;
  return d;
}

nlohmann::json tracker_to_json(const TrackerConfig& c);
nlohmann::json disturbance_to_json(const DisturbanceConfig& c);

/// Stand-in for a learned chunking policy. It holds the reference trajectory
/// for the live scene, locates the waypoint nearest the observed end effector
/// and emits the next chunk_len waypoint targets the replay controller would
/// pursue from there: a short kinematic rollout with the same advance rule that
/// produced the recorded actions.
///
/// The nearest-waypoint search runs over a forward window from a monotone
/// cursor and measures distance in (position, gripper width), so repeated
/// positions such as a grasp in place are disambiguated by the gripper.
class ScriptedPolicy {
 public:
  ScriptedPolicy(std::vector<Waypoint> reference, TrackerConfig tracker, DisturbanceConfig disturbance = {},
                 std::uint64_t noise_seed = 0);

  /// Must be called once per control step with increasing t.
  ActionChunk chunk(const Observation& obs, long long t);

  /// Waypoint targets for the next chunk_len steps starting from `obs` with the
  /// nearest waypoint `cursor`. A nonzero `rewind` ahead of a gripper event starts
  /// the rollout that many waypoints earlier: the "late grasp" hypothesis, which
  /// believes the approach is not finished yet.
  std::vector<std::size_t> rollout_indices(const Observation& obs, std::size_t cursor,
                                           std::size_t rewind = 0) const;

  /// True when a gripper change lies within the next `reach` waypoints.
  bool gripper_event_ahead(std::size_t cursor, std::size_t reach) const;

  std::size_t cursor() const { return cursor_; }
  std::size_t size() const { return reference_.size(); }
  const std::vector<Waypoint>& reference() const { return reference_; }
  bool late_hypothesis_active() const { return last_was_late_; }

 private:
  std::size_t match(const Observation& obs);

  std::vector<Waypoint> reference_;
  TrackerConfig tracker_;
  DisturbanceConfig disturbance_;
  Rng noise_rng_;
  std::vector<Observation> history_;
  std::size_t cursor_ = 0;
  int stalled_ = 0;
  long long emitted_ = 0;
  bool last_was_late_ = false;
};

}  // namespace warpdemo
