#include <doctest.h>

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "warpdemo/trajectory.hpp"

using namespace warpdemo;
using nlohmann::json;

namespace {

const std::string kDemos = WARPDEMO_DATA_DIR "/demos/";

json minimal_doc() {
  return json::parse(R"({
    "format_version": 1, "task": "pick_place", "g_max": 0.08,
    "segments": [{"label": "move", "anchor_start": [0.1, 0.0, 0.02], "anchor_goal": [0.0, 0.1, 0.1], "count": 2}],
    "waypoints": [{"t": 0.0, "p": [0.1, 0.0, 0.02], "g": 0.08}, {"t": 0.05, "p": [0.0, 0.1, 0.1], "g": 0.0}]
  })");
}

Rot3 rot90z() {
  Rot3 r;
  r << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  return r;
}

}  // namespace

TEST_CASE("parse_demo: minimal valid document") {
  const auto d = parse_demo(minimal_doc());
  CHECK(d.task == TaskKind::PickPlace);
  CHECK(d.segments.size() == 1);
  CHECK(d.waypoints.size() == 2);
  CHECK(d.segments[0].begin == 0);
  CHECK(d.segments[0].end == 2);
}

TEST_CASE("parse_demo: rejections") {
  SUBCASE("decreasing time names the offending waypoint") {
    auto doc = minimal_doc();
    doc["segments"][0]["count"] = 3;
    doc["waypoints"].push_back({{"t", 0.02}, {"p", {0.0, 0.1, 0.1}}, {"g", 0.0}});
    try {
      parse_demo(doc);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      REQUIRE(e.index().has_value());
      CHECK(*e.index() == 2);
    }
  }
  SUBCASE("unknown format version") {
    auto doc = minimal_doc();
    doc["format_version"] = 2;
    CHECK_THROWS_AS(parse_demo(doc), ParseError);
  }
  SUBCASE("malformed text") { CHECK_THROWS_AS(parse_demo_text("{\"format_version\": 1,"), ParseError); }
  SUBCASE("missing field") {
    auto doc = minimal_doc();
    doc["waypoints"][1].erase("g");
    CHECK_THROWS_AS(parse_demo(doc), ParseError);
  }
  SUBCASE("gripper above g_max") {
    auto doc = minimal_doc();
    doc["waypoints"][1]["g"] = 0.09;
    CHECK_THROWS_AS(parse_demo(doc), ValidationError);
  }
  SUBCASE("single-waypoint segment") {
    auto doc = minimal_doc();
    doc["segments"][0]["count"] = 1;
    doc["segments"].push_back({{"label", "b"}, {"anchor_start", {0, 0, 0}}, {"anchor_goal", {1, 0, 0}}, {"count", 1}});
    CHECK_THROWS_AS(parse_demo(doc), ValidationError);
  }
  SUBCASE("counts do not cover the waypoints") {
    auto doc = minimal_doc();
    doc["segments"][0]["count"] = 5;
    CHECK_THROWS_AS(parse_demo(doc), ValidationError);
  }
  SUBCASE("waypoint far outside the workspace") {
    auto doc = minimal_doc();
    doc["waypoints"][1]["p"] = {2.0, 0.0, 0.1};
    CHECK_THROWS_AS(parse_demo(doc), ValidationError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_demo(kDemos + "does_not_exist.json"), ParseError); }
}

TEST_CASE("bundled fixtures match their manifest") {
  std::ifstream in(kDemos + "manifest.json");
  REQUIRE(in);
  const json manifest = json::parse(in);
  for (const auto& [file, entry] : manifest.items()) {
    CAPTURE(file);
    const auto d = load_demo(kDemos + file);
    CHECK(std::string(to_string(d.task)) == entry["task"].get<std::string>());
    CHECK(d.waypoints.size() == entry["waypoints"].get<std::size_t>());
    REQUIRE(d.segments.size() == entry["segments"].get<std::size_t>());
    for (std::size_t i = 0; i < d.segments.size(); ++i) {
      CHECK(d.segments[i].size() == entry["segment_counts"][i].get<std::size_t>());
    }
  }
  CHECK(load_demo(kDemos + "pick_place.json").segments.size() == 1);
}

TEST_CASE("demo JSON round trip") {
  const auto d = load_demo(kDemos + "stack.json");
  const auto back = parse_demo(json::parse(demo_to_json(d).dump()));
  REQUIRE(back.waypoints.size() == d.waypoints.size());
  for (std::size_t i = 0; i < d.waypoints.size(); ++i) {
    CHECK(back.waypoints[i].position == d.waypoints[i].position);
    CHECK(back.waypoints[i].gripper == d.waypoints[i].gripper);
    CHECK(back.waypoints[i].time == d.waypoints[i].time);
  }
  CHECK(back.segments[1].anchor_goal == d.segments[1].anchor_goal);
}

TEST_CASE("augment_segmentwise: identity anchors reproduce the input") {
  const auto d = load_demo(kDemos + "stack.json");
  std::vector<AnchorPair> anchors;
  for (const auto& s : d.segments) anchors.push_back({s.anchor_start, s.anchor_goal, s.anchor_start, s.anchor_goal});
  const auto aug = augment_segmentwise(d, anchors);
  for (std::size_t i = 0; i < d.waypoints.size(); ++i) {
    CHECK((aug.trajectory.waypoints[i].position - d.waypoints[i].position).norm() < 1e-9);
  }
}

TEST_CASE("augment_segmentwise: quarter turn lands the endpoints on the new anchors") {
  const auto d = parse_demo(minimal_doc());
  const auto& s = d.segments[0];
  const Vec3 pivot(0.05, -0.02, 0.0);
  const AnchorPair a{s.anchor_start, s.anchor_goal, rot90z() * (s.anchor_start - pivot) + pivot,
                     rot90z() * (s.anchor_goal - pivot) + pivot};
  const auto aug = augment_segmentwise(d, std::vector<AnchorPair>{a});
  CHECK((aug.trajectory.waypoints.front().position - a.generated_start).norm() < 1e-9);
  CHECK((aug.trajectory.waypoints.back().position - a.generated_goal).norm() < 1e-9);
  CHECK((aug.transforms[0].rotation - rot90z()).norm() < 1e-9);
}

TEST_CASE("augment_segmentwise: two segments warp independently") {
  const auto d = load_demo(kDemos + "stack.json");
  const std::vector<AnchorPair> anchors = {
      {d.segments[0].anchor_start, d.segments[0].anchor_goal, Vec3(0.2, 0.1, 0.02), Vec3(-0.1, -0.2, 0.02)},
      {d.segments[1].anchor_start, d.segments[1].anchor_goal, Vec3(0.0, 0.25, 0.02), Vec3(-0.1, -0.2, 0.06)},
  };
  const auto aug = augment_segmentwise(d, anchors);
  const auto t0 = synthesize_transform(anchors[0]);
  const auto t1 = synthesize_transform(anchors[1]);

  const std::size_t last0 = d.segments[0].end - 1;
  const std::size_t first1 = d.segments[1].begin;
  CHECK((aug.trajectory.waypoints[last0].position - t0.apply(d.waypoints[last0].position)).norm() < 1e-12);
  CHECK((aug.trajectory.waypoints[first1].position - t1.apply(d.waypoints[first1].position)).norm() < 1e-12);
  CHECK((aug.trajectory.waypoints[first1].position - t0.apply(d.waypoints[first1].position)).norm() > 1e-3);

  // structure, gripper sequence and timing untouched; distances scale per segment
  REQUIRE(aug.trajectory.waypoints.size() == d.waypoints.size());
  for (std::size_t i = 0; i < d.waypoints.size(); ++i) {
    CHECK(aug.trajectory.waypoints[i].gripper == d.waypoints[i].gripper);
    CHECK(aug.trajectory.waypoints[i].time == d.waypoints[i].time);
  }
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& seg = d.segments[k];
    const double s = aug.transforms[k].scale;
    const auto& a = d.waypoints[seg.begin].position;
    const auto& b = d.waypoints[seg.end - 1].position;
    const auto& a2 = aug.trajectory.waypoints[seg.begin].position;
    const auto& b2 = aug.trajectory.waypoints[seg.end - 1].position;
    CHECK(std::abs((a2 - b2).norm() - s * (a - b).norm()) < 1e-9);
    CHECK(aug.trajectory.segments[k].begin == seg.begin);
    CHECK(aug.trajectory.segments[k].end == seg.end);
  }
}

TEST_CASE("augment_segmentwise: errors carry the segment index") {
  const auto d = load_demo(kDemos + "stack.json");
  std::vector<AnchorPair> anchors = {
      {d.segments[0].anchor_start, d.segments[0].anchor_goal, Vec3(0.2, 0.1, 0.02), Vec3(-0.1, -0.2, 0.02)},
      {d.segments[1].anchor_start, d.segments[1].anchor_goal, Vec3(0.1, 0.1, 0.02), Vec3(0.1, 0.1, 0.02)},
  };
  try {
    augment_segmentwise(d, anchors);
    FAIL("expected SegmentError");
  } catch (const SegmentError& e) {
    CHECK(e.segment() == 1);
  }
  anchors.pop_back();
  CHECK_THROWS_AS(augment_segmentwise(d, anchors), std::invalid_argument);
}
