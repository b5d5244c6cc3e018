#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include <json.hpp>

#include "warpdemo/campaign.hpp"
#include "warpdemo/sim.hpp"

namespace warpdemo {

// Shared by episode files, manifests and the ensembler diagnostics stream.
inline constexpr int kDatasetSchemaVersion = 1;

nlohmann::json vec_to_json(const Vec3& v);
nlohmann::json transform_to_json(const AffineTransform& t);
nlohmann::json anchors_to_json(const AnchorPair& a);

/// One JSON object per line: an "episode" header, one "step" line per control
/// step, and a closing "final" line with the terminal state.
void write_episode_ndjson(std::ostream& out, const EpisodeRecord& rec, std::size_t index);

std::string episode_file_name(std::size_t index);

/// Writes manifest.json and episodes/episode_NNNNNN.ndjson under `dir`.
/// `run_config` is embedded verbatim in the manifest.
void write_dataset(const std::filesystem::path& dir, const Dataset& ds, const nlohmann::json& run_config);

nlohmann::json read_json_file(const std::filesystem::path& path);

struct DatasetStats {
  std::string task;
  std::size_t episodes = 0;
  std::size_t attempts = 0;
  double discard_rate = 0.0;
  std::size_t total_steps = 0;
  std::size_t min_steps = 0;
  std::size_t max_steps = 0;
  std::size_t successful_episodes = 0;  // from the episode headers
  double mean_final_error = 0.0;       // mean over blocks and episodes, meters
  double max_final_error = 0.0;
};

/// Re-reads every episode file listed in the manifest.
DatasetStats read_dataset_stats(const std::filesystem::path& dir);

}  // namespace warpdemo
