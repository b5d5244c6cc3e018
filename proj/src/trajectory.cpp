#include "warpdemo/trajectory.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace warpdemo {
namespace {

using nlohmann::json;

constexpr double kWorkspaceMargin = 0.2;

Vec3 read_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError(where + ": expected [x, y, z]");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) {
      throw ParseError(where + ": non-numeric component");
    }
    v[i] = j[i].get<double>();
  }
  return v;
}

const json& member(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  return *it;
}

double read_number(const json& obj, const char* key, const std::string& where) {
  const json& j = member(obj, key, where);
  if (!j.is_number()) {
    throw ParseError(where + ": field '" + key + "' must be a number");
  }
  return j.get<double>();
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

void validate_demo(const DemoTrajectory& demo, const Workspace& ws) {
  if (demo.segments.empty()) {
    throw ValidationError("demo has no segments");
  }
  if (!(demo.g_max > 0.0)) {
    throw ValidationError("g_max must be positive");
  }
  std::size_t expected_begin = 0;
  for (std::size_t i = 0; i < demo.segments.size(); ++i) {
    const auto& s = demo.segments[i];
    if (s.begin != expected_begin || s.end < s.begin) {
      throw ValidationError("segment " + std::to_string(i) + " is not contiguous with its predecessor", i);
    }
    if (s.size() < 2) {
      throw ValidationError("segment " + std::to_string(i) + " has fewer than 2 waypoints", i);
    }
    if (!s.anchor_start.allFinite() || !s.anchor_goal.allFinite()) {
      throw ValidationError("segment " + std::to_string(i) + " has non-finite anchors", i);
    }
    expected_begin = s.end;
  }
  if (expected_begin != demo.waypoints.size()) {
    throw ValidationError("segment counts cover " + std::to_string(expected_begin) + " waypoints but the demo has " +
                          std::to_string(demo.waypoints.size()));
  }

  const double lim = ws.half_side() + kWorkspaceMargin;
  const double z_lo = -kWorkspaceMargin;
  const double z_hi = ws.goal_z_max + kWorkspaceMargin;
  for (std::size_t i = 0; i < demo.waypoints.size(); ++i) {
    const auto& w = demo.waypoints[i];
    if (!std::isfinite(w.time) || !w.position.allFinite() || !std::isfinite(w.gripper)) {
      throw ValidationError("waypoint " + std::to_string(i) + " has non-finite values", i);
    }
    if (i > 0 && !(w.time > demo.waypoints[i - 1].time)) {
      throw ValidationError("waypoint " + std::to_string(i) + " does not advance in time", i);
    }
    if (w.gripper < 0.0 || w.gripper > demo.g_max) {
      throw ValidationError("waypoint " + std::to_string(i) + " gripper width outside [0, g_max]", i);
    }
    const Vec3& p = w.position;
    if (std::abs(p.x()) > lim || std::abs(p.y()) > lim || p.z() < z_lo || p.z() > z_hi) {
      throw ValidationError("waypoint " + std::to_string(i) + " lies outside the workspace", i);
    }
  }
}

DemoTrajectory parse_demo(const json& doc, const Workspace& ws) {
  if (!doc.is_object()) {
    throw ParseError("demo document must be a JSON object");
  }
  const json& version = member(doc, "format_version", "demo");
  if (!version.is_number_integer() || version.get<int>() != kDemoFormatVersion) {
    throw ParseError("unsupported format_version " + version.dump());
  }

  DemoTrajectory demo;
  const json& task = member(doc, "task", "demo");
  if (!task.is_string()) {
    throw ParseError("demo: 'task' must be a string");
  }
  auto kind = parse_task_kind(task.get<std::string>());
  if (!kind) {
    throw ParseError("demo: unknown task '" + task.get<std::string>() + "'");
  }
  demo.task = *kind;
  demo.g_max = read_number(doc, "g_max", "demo");
  if (auto it = doc.find("source_id"); it != doc.end() && it->is_string()) {
    demo.source_id = it->get<std::string>();
  }

  const json& segs = member(doc, "segments", "demo");
  const json& wps = member(doc, "waypoints", "demo");
  if (!segs.is_array() || !wps.is_array()) {
    throw ParseError("demo: 'segments' and 'waypoints' must be arrays");
  }

  std::size_t cursor = 0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string where = "segments[" + std::to_string(i) + "]";
    const json& s = segs[i];
    if (!s.is_object()) {
      throw ParseError(where + ": expected object");
    }
    Segment seg;
    const json& label = member(s, "label", where);
    if (!label.is_string()) {
      throw ParseError(where + ": 'label' must be a string");
    }
    seg.label = label.get<std::string>();
    seg.anchor_start = read_vec3(member(s, "anchor_start", where), where + ".anchor_start");
    seg.anchor_goal = read_vec3(member(s, "anchor_goal", where), where + ".anchor_goal");
    const json& count = member(s, "count", where);
    if (!count.is_number_integer() || count.get<long long>() < 0) {
      throw ParseError(where + ": 'count' must be a non-negative integer");
    }
    seg.begin = cursor;
    seg.end = cursor + count.get<std::size_t>();
    cursor = seg.end;
    demo.segments.push_back(std::move(seg));
  }

  demo.waypoints.reserve(wps.size());
  for (std::size_t i = 0; i < wps.size(); ++i) {
    const std::string where = "waypoints[" + std::to_string(i) + "]";
    const json& w = wps[i];
    if (!w.is_object()) {
      throw ParseError(where + ": expected object");
    }
    Waypoint wp;
    wp.time = read_number(w, "t", where);
    wp.position = read_vec3(member(w, "p", where), where + ".p");
    wp.gripper = read_number(w, "g", where);
    demo.waypoints.push_back(wp);
  }

  validate_demo(demo, ws);
  return demo;
}

DemoTrajectory parse_demo_text(const std::string& text, const Workspace& ws) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return parse_demo(doc, ws);
}

DemoTrajectory load_demo(const std::string& path, const Workspace& ws) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open demo file '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_demo_text(buf.str(), ws);
}

json demo_to_json(const DemoTrajectory& demo) {
  json segs = json::array();
  for (const auto& s : demo.segments) {
    segs.push_back({{"label", s.label},
                    {"anchor_start", vec_json(s.anchor_start)},
                    {"anchor_goal", vec_json(s.anchor_goal)},
                    {"count", s.size()}});
  }
  json wps = json::array();
  for (const auto& w : demo.waypoints) {
    wps.push_back({{"t", w.time}, {"p", vec_json(w.position)}, {"g", w.gripper}});
  }
  return {{"format_version", kDemoFormatVersion},
          {"task", std::string(to_string(demo.task))},
          {"source_id", demo.source_id},
          {"g_max", demo.g_max},
          {"segments", std::move(segs)},
          {"waypoints", std::move(wps)}};
}

AugmentedDemo augment_segmentwise(const DemoTrajectory& demo, std::span<const AnchorPair> anchors,
                                  const GeometryTolerances& tol) {
  if (anchors.size() != demo.segments.size()) {
    throw std::invalid_argument("augment_segmentwise: " + std::to_string(anchors.size()) +
                                " anchor pairs for " + std::to_string(demo.segments.size()) + " segments");
  }
  AugmentedDemo out;
  out.trajectory = demo;
  out.transforms.reserve(anchors.size());
  for (std::size_t i = 0; i < demo.segments.size(); ++i) {
    AffineTransform t;
    try {
      t = synthesize_transform(anchors[i], tol);
    } catch (const GeometryError& e) {
      throw SegmentError(i, e.what());
    }
    const auto& seg = demo.segments[i];
    for (std::size_t k = seg.begin; k < seg.end; ++k) {
      out.trajectory.waypoints[k].position = t.apply(demo.waypoints[k].position);
    }
    out.trajectory.segments[i].anchor_start = anchors[i].generated_start;
    out.trajectory.segments[i].anchor_goal = anchors[i].generated_goal;
    out.transforms.push_back(t);
  }
  return out;
}

}  // namespace warpdemo
