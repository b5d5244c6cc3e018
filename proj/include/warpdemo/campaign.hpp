#pragma once

#include <cstdint>
#include <vector>

#include "warpdemo/sim.hpp"
#include "warpdemo/tasks.hpp"
#include "warpdemo/trajectory.hpp"

namespace warpdemo {

struct CampaignConfig {
  TaskKind task = TaskKind::PickPlace;
  std::size_t count = 1;
  std::size_t attempt_cap = 0;  // 0 means 20 * count
  std::uint64_t seed = 0;
  ReplayOptions replay;

  std::size_t effective_cap() const { return attempt_cap == 0 ? 20 * count : attempt_cap; }
  void validate() const;
};

struct Dataset {
  TaskKind task = TaskKind::PickPlace;
  std::vector<EpisodeRecord> episodes;  // successful only, ordered by attempt index
  std::size_t attempts = 0;
  std::size_t requested = 0;
  bool cap_exceeded = false;

  std::size_t successes() const { return episodes.size(); }
  std::size_t discarded() const { return attempts - episodes.size(); }
  double discard_rate() const {
    return attempts == 0 ? 0.0 : static_cast<double>(discarded()) / static_cast<double>(attempts);
  }
};

/// Sample the scene for `attempt`, warp the demo onto it and replay.
/// A scene whose anchors cannot be synthesized yields a failed, step-less record.
EpisodeRecord run_attempt(const DemoTrajectory& demo, const CampaignConfig& cfg, std::size_t attempt);

/// Reference implementation: one attempt at a time until `count` successes or the cap.
Dataset run_campaign_serial(const DemoTrajectory& demo, const CampaignConfig& cfg);

/// OpenMP version. Attempts run in batches and are accepted in attempt order, so
/// the result is identical to run_campaign_serial for any `jobs`.
/// jobs == 0 uses the OpenMP default.
Dataset run_campaign(const DemoTrajectory& demo, const CampaignConfig& cfg, int jobs = 0);

}  // namespace warpdemo
