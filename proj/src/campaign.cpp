#include "warpdemo/campaign.hpp"

#include <algorithm>
#include <exception>

#include <omp.h>

#include "warpdemo/rng.hpp"

namespace warpdemo {

void CampaignConfig::validate() const {
  if (count < 1) throw ConfigError("campaign count must be at least 1");
  if (attempt_cap != 0 && attempt_cap < count) throw ConfigError("attempt cap is below the requested count");
  replay.controller.validate();
  replay.grasp.validate();
  replay.success.validate();
  replay.workspace.validate();
}

EpisodeRecord run_attempt(const DemoTrajectory& demo, const CampaignConfig& cfg, std::size_t attempt) {
  const std::uint64_t seed = derive_seed(cfg.seed, attempt);
  const Scene scene = sample_scene(cfg.task, cfg.replay.workspace, seed);

  EpisodeRecord rec;
  try {
    auto anchors = anchors_for_scene(cfg.task, demo, scene);
    auto aug = augment_segmentwise(demo, anchors);
    rec = replay(aug.trajectory, scene, cfg.replay);
    rec.provenance.anchors = std::move(anchors);
    rec.provenance.transforms = std::move(aug.transforms);
  } catch (const ValidationError&) {
    rec = EpisodeRecord{};
  } catch (const SegmentError&) {
    rec = EpisodeRecord{};
  }
  rec.task = cfg.task;
  rec.goals = scene.block_goals;
  rec.provenance.scene_seed = seed;
  rec.attempt = static_cast<long long>(attempt);
  return rec;
}

Dataset run_campaign_serial(const DemoTrajectory& demo, const CampaignConfig& cfg) {
  cfg.validate();
  Dataset ds;
  ds.task = cfg.task;
  ds.requested = cfg.count;
  const std::size_t cap = cfg.effective_cap();
  while (ds.successes() < cfg.count && ds.attempts < cap) {
    EpisodeRecord rec = run_attempt(demo, cfg, ds.attempts);
    ++ds.attempts;
    if (rec.success) {
      ds.episodes.push_back(std::move(rec));
    }
  }
  ds.cap_exceeded = ds.successes() < cfg.count;
  return ds;
}

Dataset run_campaign(const DemoTrajectory& demo, const CampaignConfig& cfg, int jobs) {
  cfg.validate();
  Dataset ds;
  ds.task = cfg.task;
  ds.requested = cfg.count;
  const std::size_t cap = cfg.effective_cap();
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  const std::size_t batch = std::max<std::size_t>(16, 4 * static_cast<std::size_t>(threads));

  std::size_t next = 0;
  while (ds.successes() < cfg.count && next < cap) {
    const std::size_t n = std::min(batch, cap - next);
    std::vector<EpisodeRecord> results(n);
    std::vector<std::exception_ptr> errors(n);

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      try {
        results[i] = run_attempt(demo, cfg, next + static_cast<std::size_t>(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }

    for (std::size_t i = 0; i < n && ds.successes() < cfg.count; ++i) {
      if (errors[i]) std::rethrow_exception(errors[i]);
      ++ds.attempts;
      if (results[i].success) {
        ds.episodes.push_back(std::move(results[i]));
      }
    }
    next += n;
  }
  ds.cap_exceeded = ds.successes() < cfg.count;
  return ds;
}

}  // namespace warpdemo
