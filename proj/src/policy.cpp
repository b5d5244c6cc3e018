#include "warpdemo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace warpdemo {

void TrackerConfig::validate() const {
  if (chunk_len == 0) throw ConfigError("tracker chunk length must be positive");
  if (search_window == 0) throw ConfigError("tracker search window must be positive");
  if (!(gripper_weight >= 0.0)) throw ConfigError("gripper weight must be non-negative");
  if (stall_steps < 1) throw ConfigError("stall steps must be positive");
  controller.validate();
}

void DisturbanceConfig::validate() const {
  if (latency < 0) throw ConfigError("latency must be non-negative");
  if (bimodal_period < 0) throw ConfigError("bimodal period must be non-negative");
  if (bimodal_gap < 0) throw ConfigError("bimodal gap must be non-negative");
  if (!(noise >= 0.0)) throw ConfigError("noise amplitude must be non-negative");
}

nlohmann::json tracker_to_json(const TrackerConfig& c) {
  return {{"chunk_len", c.chunk_len},
          {"search_window", c.search_window},
          {"gripper_weight", c.gripper_weight},
          {"stall_steps", c.stall_steps}};
}

nlohmann::json disturbance_to_json(const DisturbanceConfig& c) {
  return {{"latency", c.latency},
          {"bimodal_period", c.bimodal_period},
          {"bimodal_gap", c.bimodal_gap},
          {"noise", c.noise}};
}

ScriptedPolicy::ScriptedPolicy(std::vector<Waypoint> reference, TrackerConfig tracker, DisturbanceConfig disturbance,
                               std::uint64_t noise_seed)
    : reference_(std::move(reference)), tracker_(tracker), disturbance_(disturbance), noise_rng_(noise_seed) {
  if (reference_.empty()) throw std::invalid_argument("scripted policy needs a nonempty reference trajectory");
  tracker_.validate();
  disturbance_.validate();
}

std::size_t ScriptedPolicy::match(const Observation& obs) {
  const std::size_t last = reference_.size() - 1;
  const std::size_t hi = std::min(last, cursor_ + tracker_.search_window);
  std::size_t best = cursor_;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = cursor_; i <= hi; ++i) {
    const auto& w = reference_[i];
    const double d = (w.position - obs.ee_pos).norm() + tracker_.gripper_weight * std::abs(w.gripper - obs.gripper);
    // later index wins ties so repeated samples do not hold the cursor back
    if (d <= best_d) {
      best_d = d;
      best = i;
    }
  }
  if (best == cursor_) {
    if (++stalled_ >= tracker_.stall_steps && cursor_ < last) {
      ++best;
      stalled_ = 0;
    }
  } else {
    stalled_ = 0;
  }
  cursor_ = best;
  return cursor_;
}

bool ScriptedPolicy::gripper_event_ahead(std::size_t cursor, std::size_t reach) const {
  const std::size_t hi = std::min(reference_.size() - 1, cursor + reach);
  for (std::size_t i = cursor + 1; i <= hi; ++i) {
    if (reference_[i].gripper != reference_[i - 1].gripper) return true;
  }
  return false;
}

std::vector<std::size_t> ScriptedPolicy::rollout_indices(const Observation& obs, std::size_t cursor,
                                                         std::size_t rewind) const {
  const auto& ctrl = tracker_.controller;
  const std::size_t last = reference_.size() - 1;
  auto reached = [&](const SimState& s, const Waypoint& w) {
    return (s.ee_pos - w.position).norm() <= ctrl.waypoint_advance_radius &&
           std::abs(s.gripper - w.gripper) <= ctrl.gripper_advance_tolerance;
  };

  SimState sim;
  sim.ee_pos = obs.ee_pos;
  sim.gripper = obs.gripper;
  std::size_t active = cursor;
  if (rewind > 0 && gripper_event_ahead(cursor, tracker_.chunk_len)) {
    active = cursor > rewind ? cursor - rewind : 0;
  } else if (cursor < last && reached(sim, reference_[cursor])) {
    ++active;
  }
  int on_waypoint = 0;

  std::vector<std::size_t> idx;
  idx.reserve(tracker_.chunk_len);
  while (idx.size() < tracker_.chunk_len) {
    idx.push_back(active);
    const Waypoint& w = reference_[active];
    sim = step(sim, {w.position, w.gripper}, ctrl);
    ++on_waypoint;
    if (active < last && (reached(sim, w) || on_waypoint >= ctrl.timeout_steps())) {
      ++active;
      on_waypoint = 0;
    }
  }
  return idx;
}

ActionChunk ScriptedPolicy::chunk(const Observation& obs, long long t) {
  history_.push_back(obs);
  const long long lagged = static_cast<long long>(history_.size()) - 1 - disturbance_.latency;
  const Observation& seen = history_[static_cast<std::size_t>(std::max<long long>(0, lagged))];
  const std::size_t c = match(seen);

  last_was_late_ = disturbance_.bimodal_period > 0 && (emitted_ / disturbance_.bimodal_period) % 2 == 1;
  ++emitted_;
  const auto idx = rollout_indices(seen, c, last_was_late_ ? static_cast<std::size_t>(disturbance_.bimodal_gap) : 0);

  ActionChunk out;
  out.emitted_at = t;
  out.actions.reserve(idx.size());
  for (std::size_t i : idx) {
    Action a{reference_[i].position, reference_[i].gripper};
    if (disturbance_.noise > 0.0) {
      for (int axis = 0; axis < 3; ++axis) {
        a.pos[axis] += noise_rng_.uniform(-disturbance_.noise, disturbance_.noise);
      }
    }
    out.actions.push_back(a);
  }
  return out;
}

}  // namespace warpdemo
