#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "warpdemo/campaign.hpp"
#include "warpdemo/dataset_io.hpp"
#include "warpdemo/sim.hpp"

using namespace warpdemo;
namespace fs = std::filesystem;

namespace {

const std::string kDemos = WARPDEMO_DATA_DIR "/demos/";

SimState one_block(const Vec3& ee, double g, const Vec3& block) {
  SimState s;
  s.ee_pos = ee;
  s.gripper = g;
  s.blocks.push_back({block, false});
  return s;
}

bool same_record(const EpisodeRecord& a, const EpisodeRecord& b) {
  std::ostringstream x, y;
  write_episode_ndjson(x, a, 0);
  write_episode_ndjson(y, b, 0);
  return x.str() == y.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("step: fixed point") {
  const ControllerConfig cfg;
  const auto s = one_block(Vec3(0.1, 0.2, 0.1), 0.05, Vec3(0.3, 0.3, 0.02));
  const auto n = step(s, {s.ee_pos, s.gripper}, cfg);
  CHECK(n.ee_pos == s.ee_pos);
  CHECK(n.gripper == s.gripper);
  CHECK(n.blocks[0].pos == s.blocks[0].pos);
}

TEST_CASE("step: speed clamp") {
  const ControllerConfig cfg;
  SimState s;
  const auto n = step(s, {Vec3(1, 0, 0), 0.0}, cfg);
  // |gain * error| = 5 m/s is clamped to 0.5 m/s, times dt = 0.05 s
  CHECK(n.ee_pos.x() == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(n.ee_pos.y() == 0.0);
  CHECK(n.time == doctest::Approx(0.05));
}

TEST_CASE("step: gripper rate limit") {
  const ControllerConfig cfg;
  SimState s;
  s.gripper = 0.08;
  const auto n = step(s, {Vec3::Zero(), 0.0}, cfg);
  CHECK(n.gripper == doctest::Approx(0.07).epsilon(1e-12));
}

TEST_CASE("step: grasp, carry and release") {
  const ControllerConfig cfg;
  const GraspModel grasp;
  auto s = one_block(Vec3(0.1, 0.1, 0.03), 0.045, Vec3(0.1, 0.1, 0.02));
  s = step(s, {s.ee_pos, 0.0}, cfg, grasp);
  REQUIRE(s.held_block() == std::optional<std::size_t>(0));
  const Vec3 offset = s.blocks[0].pos - s.ee_pos;
  CHECK((offset - Vec3(0, 0, -0.01)).norm() < 1e-12);

  for (int i = 0; i < 20; ++i) {
    s = step(s, {Vec3(-0.1, 0.0, 0.15), 0.0}, cfg, grasp);
    CHECK((s.blocks[0].pos - (s.ee_pos + offset)).norm() < 1e-12);
  }
  for (int i = 0; i < 10 && s.held_block(); ++i) s = step(s, {s.ee_pos, 0.08}, cfg, grasp);
  CHECK_FALSE(s.held_block().has_value());
  CHECK(s.blocks[0].pos.z() == doctest::Approx(0.02));
}

TEST_CASE("step: closing outside the capture box grabs nothing") {
  const ControllerConfig cfg;
  auto s = one_block(Vec3(0.1, 0.1, 0.05), 0.045, Vec3(0.1, 0.1, 0.02));
  s = step(s, {s.ee_pos, 0.0}, cfg);
  CHECK_FALSE(s.held_block().has_value());
}

TEST_CASE("step: release onto another block") {
  const ControllerConfig cfg;
  SimState s;
  s.ee_pos = Vec3(0.0, 0.0, 0.09);
  s.gripper = 0.035;
  s.blocks = {{Vec3(0.005, 0.0, 0.02), false}, {Vec3(0.0, 0.0, 0.08), true}};
  s.grasp_offset = Vec3(0, 0, -0.01);
  s = step(s, {s.ee_pos, 0.08}, cfg);
  CHECK_FALSE(s.held_block().has_value());
  CHECK(s.blocks[1].pos.z() == doctest::Approx(0.06));
}

TEST_CASE("controller config validation") {
  ControllerConfig cfg;
  cfg.gain = 50.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.max_speed = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("identity replay of every bundled demo succeeds") {
  for (const char* name : {"pick_place.json", "push.json", "stack.json"}) {
    CAPTURE(name);
    const auto demo = load_demo(kDemos + name);
    const auto rec = replay(demo, scene_from_demo(demo));
    CHECK(rec.success);
    CHECK(rec.steps.size() >= demo.waypoints.size());
  }
}

TEST_CASE("replay: displaced grasp waypoint fails without ever holding the block") {
  auto demo = load_demo(kDemos + "pick_place.json");
  const auto scene = scene_from_demo(demo);
  for (auto& w : demo.waypoints) w.position.x() += 0.10;
  const auto rec = replay(demo, scene);
  CHECK_FALSE(rec.success);
  for (const auto& s : rec.steps) CHECK_FALSE(s.block_held[0]);
}

TEST_CASE("replay: physical sanity and controller bound over a stack episode") {
  const auto demo = load_demo(kDemos + "stack.json");
  const CampaignConfig cfg{TaskKind::Stack, 1, 0, 99, {}};
  const auto rec = run_attempt(demo, cfg, 0);
  REQUIRE(rec.steps.size() > 1);
  const double bound = cfg.replay.controller.max_speed * cfg.replay.controller.dt + 1e-12;
  for (std::size_t i = 0; i < rec.steps.size(); ++i) {
    const auto& s = rec.steps[i];
    for (std::size_t b = 0; b < s.block_pos.size(); ++b) {
      if (!s.block_held[b]) CHECK(s.block_pos[b].z() >= 0.02 - 1e-9);
    }
    if (i > 0) CHECK((s.ee_pos - rec.steps[i - 1].ee_pos).norm() <= bound);
  }
}

TEST_CASE("replay is deterministic") {
  const auto demo = load_demo(kDemos + "stack.json");
  const CampaignConfig cfg{TaskKind::Stack, 1, 0, 5, {}};
  CHECK(same_record(run_attempt(demo, cfg, 3), run_attempt(demo, cfg, 3)));
}

TEST_CASE("campaign: filter soundness and exact count") {
  for (const char* name : {"pick_place.json", "stack.json", "push.json"}) {
    CAPTURE(name);
    const auto demo = load_demo(kDemos + name);
    CampaignConfig cfg;
    cfg.task = demo.task;
    cfg.count = 25;
    cfg.seed = 7;
    const auto ds = run_campaign(demo, cfg, 2);
    CHECK(ds.successes() == 25);
    CHECK_FALSE(ds.cap_exceeded);
    CHECK(ds.attempts >= 25);
    for (const auto& e : ds.episodes) {
      Scene scene;
      scene.block_goals = e.goals;
      CHECK(e.success);
      CHECK(success(demo.task, e.final_state, scene));
    }
  }
}

TEST_CASE("campaign: parallel output equals the serial reference") {
  const auto demo = load_demo(kDemos + "stack.json");
  CampaignConfig cfg;
  cfg.task = TaskKind::Stack;
  cfg.count = 12;
  cfg.seed = 31;
  const auto ref = run_campaign_serial(demo, cfg);
  for (int jobs : {1, 3, 8}) {
    const auto par = run_campaign(demo, cfg, jobs);
    REQUIRE(par.episodes.size() == ref.episodes.size());
    CHECK(par.attempts == ref.attempts);
    for (std::size_t i = 0; i < ref.episodes.size(); ++i) CHECK(same_record(par.episodes[i], ref.episodes[i]));
  }
}

TEST_CASE("campaign: cap reached returns a partial dataset") {
  const auto demo = load_demo(kDemos + "pick_place.json");
  CampaignConfig cfg;
  cfg.count = 5;
  cfg.attempt_cap = 5;
  cfg.seed = 1;
  cfg.replay.success.pick_place = 1e-6;  // nothing passes
  const auto ds = run_campaign(demo, cfg);
  CHECK(ds.cap_exceeded);
  CHECK(ds.attempts == 5);
  CHECK(ds.successes() == 0);
  CHECK(ds.discard_rate() == 1.0);

  cfg.count = 0;
  CHECK_THROWS_AS(run_campaign(demo, cfg), ConfigError);
}

TEST_CASE("dataset directory round trip") {
  const auto demo = load_demo(kDemos + "pick_place.json");
  CampaignConfig cfg;
  cfg.count = 3;
  cfg.seed = 11;
  const auto ds = run_campaign(demo, cfg);
  const fs::path dir = fs::temp_directory_path() / "warpdemo_test_dataset";
  fs::remove_all(dir);
  write_dataset(dir, ds, {{"seed", 11}});

  const auto manifest = read_json_file(dir / "manifest.json");
  CHECK(manifest["schema_version"] == kDatasetSchemaVersion);
  CHECK(manifest["counts"]["successes"] == 3);
  CHECK(manifest["config"]["seed"] == 11);

  const auto st = read_dataset_stats(dir);
  CHECK(st.episodes == 3);
  CHECK(st.successful_episodes == 3);
  CHECK(st.max_final_error <= 0.05);
  std::size_t steps = 0;
  for (const auto& e : ds.episodes) steps += e.steps.size();
  CHECK(st.total_steps == steps);

  const std::string first = slurp(dir / "episodes" / episode_file_name(0));
  const fs::path dir2 = dir.string() + "_again";
  fs::remove_all(dir2);
  write_dataset(dir2, run_campaign(demo, cfg), {{"seed", 11}});
  CHECK(slurp(dir2 / "episodes" / episode_file_name(0)) == first);
  CHECK(slurp(dir2 / "manifest.json") == slurp(dir / "manifest.json"));
  fs::remove_all(dir);
  fs::remove_all(dir2);
}
