#include "warpdemo/dataset_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace warpdemo {

using nlohmann::json;
namespace fs = std::filesystem;

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json transform_to_json(const AffineTransform& t) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      rot.push_back(t.rotation(r, c));
    }
  }
  return {{"scale", t.scale},
          {"rotation", std::move(rot)},
          {"translation", vec_to_json(t.translation)},
          {"up_fallback", t.up_fallback}};
}

json anchors_to_json(const AnchorPair& a) {
  return {{"recorded_start", vec_to_json(a.recorded_start)},
          {"recorded_goal", vec_to_json(a.recorded_goal)},
          {"generated_start", vec_to_json(a.generated_start)},
          {"generated_goal", vec_to_json(a.generated_goal)}};
}

namespace {

json goals_json(const std::vector<Vec3>& goals) {
  json g = json::array();
  for (const auto& v : goals) g.push_back(vec_to_json(v));
  return g;
}

json observation_json(const Vec3& ee, double gripper, const std::vector<Vec3>& blocks,
                      const std::vector<bool>& held, const json& goals) {
  json b = json::array();
  for (const auto& p : blocks) b.push_back(vec_to_json(p));
  json h = json::array();
  for (bool x : held) h.push_back(x);
  return {{"ee", vec_to_json(ee)}, {"g", gripper}, {"blocks", std::move(b)}, {"held", std::move(h)},
          {"goals", goals}};
}

}  // namespace

std::string episode_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "episode_%06zu.ndjson", index);
  return buf;
}

void write_episode_ndjson(std::ostream& out, const EpisodeRecord& rec, std::size_t index) {
  const json goals = goals_json(rec.goals);
  json anchors = json::array();
  for (const auto& a : rec.provenance.anchors) anchors.push_back(anchors_to_json(a));
  json transforms = json::array();
  for (const auto& t : rec.provenance.transforms) transforms.push_back(transform_to_json(t));

  json header = {{"record", "episode"},
                 {"schema_version", kDatasetSchemaVersion},
                 {"index", index},
                 {"attempt", rec.attempt},
                 {"task", std::string(to_string(rec.task))},
                 {"scene_seed", rec.provenance.scene_seed},
                 {"success", rec.success},
                 {"steps", rec.steps.size()},
                 {"goals", goals},
                 {"anchors", std::move(anchors)},
                 {"transforms", std::move(transforms)}};
  out << header.dump() << '\n';

  for (std::size_t i = 0; i < rec.steps.size(); ++i) {
    const auto& s = rec.steps[i];
    json line = {{"record", "step"},
                 {"i", i},
                 {"t", s.time},
                 {"obs", observation_json(s.ee_pos, s.gripper, s.block_pos, s.block_held, goals)},
                 {"action", {{"p", vec_to_json(s.action.pos)}, {"g", s.action.gripper}}}};
    out << line.dump() << '\n';
  }

  const auto final_rec = record_step(rec.final_state, {});
  json fin = {{"record", "final"},
              {"t", final_rec.time},
              {"obs", observation_json(final_rec.ee_pos, final_rec.gripper, final_rec.block_pos,
                                       final_rec.block_held, goals)}};
  out << fin.dump() << '\n';
}

void write_dataset(const fs::path& dir, const Dataset& ds, const json& run_config) {
  fs::create_directories(dir / "episodes");
  json listing = json::array();
  for (std::size_t i = 0; i < ds.episodes.size(); ++i) {
    const auto& rec = ds.episodes[i];
    const std::string name = episode_file_name(i);
    std::ofstream out(dir / "episodes" / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / "episodes" / name).string());
    write_episode_ndjson(out, rec, i);
    listing.push_back({{"file", "episodes/" + name},
                       {"attempt", rec.attempt},
                       {"scene_seed", rec.provenance.scene_seed},
                       {"steps", rec.steps.size()},
                       {"success", rec.success}});
  }

  json manifest = {{"kind", "dataset"},
                   {"schema_version", kDatasetSchemaVersion},
                   {"code_version", std::string(kCodeVersion)},
                   {"task", std::string(to_string(ds.task))},
                   {"config", run_config},
                   {"counts",
                    {{"requested", ds.requested},
                     {"attempts", ds.attempts},
                     {"successes", ds.successes()},
                     {"discarded", ds.discarded()}}},
                   {"discard_rate", ds.discard_rate()},
                   {"attempt_cap_exceeded", ds.cap_exceeded},
                   {"episodes", std::move(listing)}};
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return json::parse(buf.str());
}

DatasetStats read_dataset_stats(const fs::path& dir) {
  const json manifest = read_json_file(dir / "manifest.json");
  if (manifest.value("kind", "") != "dataset") {
    throw std::runtime_error(dir.string() + " does not hold a dataset manifest");
  }
  DatasetStats st;
  st.task = manifest.at("task").get<std::string>();
  st.attempts = manifest.at("counts").at("attempts").get<std::size_t>();
  st.discard_rate = manifest.at("discard_rate").get<double>();

  double err_sum = 0.0;
  std::size_t err_count = 0;
  bool first = true;
  for (const auto& entry : manifest.at("episodes")) {
    std::ifstream in(dir / entry.at("file").get<std::string>());
    if (!in) throw std::runtime_error("missing episode file " + entry.at("file").get<std::string>());
    std::string line;
    std::size_t steps = 0;
    json last;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json rec = json::parse(line);
      const std::string kind = rec.at("record").get<std::string>();
      if (kind == "episode") {
        if (rec.at("success").get<bool>()) ++st.successful_episodes;
      } else if (kind == "step") {
        ++steps;
      } else if (kind == "final") {
        last = std::move(rec);
      }
    }
    ++st.episodes;
    st.total_steps += steps;
    st.min_steps = first ? steps : std::min(st.min_steps, steps);
    st.max_steps = std::max(st.max_steps, steps);
    first = false;
    if (!last.is_null()) {
      const auto& blocks = last.at("obs").at("blocks");
      const auto& goals = last.at("obs").at("goals");
      for (std::size_t b = 0; b < goals.size() && b < blocks.size(); ++b) {
        Vec3 p(blocks[b][0].get<double>(), blocks[b][1].get<double>(), blocks[b][2].get<double>());
        Vec3 g(goals[b][0].get<double>(), goals[b][1].get<double>(), goals[b][2].get<double>());
        const double e = (p - g).norm();
        err_sum += e;
        st.max_final_error = std::max(st.max_final_error, e);
        ++err_count;
      }
    }
  }
  st.mean_final_error = err_count ? err_sum / static_cast<double>(err_count) : 0.0;
  return st;
}

}  // namespace warpdemo
