#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "warpdemo/common.hpp"
#include "warpdemo/geometry.hpp"

namespace warpdemo {

inline constexpr int kDemoFormatVersion = 1;

struct Waypoint {
  double time = 0.0;           // seconds
  Vec3 position = Vec3::Zero();
  double gripper = 0.0;        // finger separation, meters
};

/// Contiguous slice [begin, end) of the waypoint list, warped by its own transform.
/// The anchors are the manipulated block's pickup point and target point as
/// annotated at recording time.
struct Segment {
  std::string label;
  std::size_t begin = 0;
  std::size_t end = 0;
  Vec3 anchor_start = Vec3::Zero();
  Vec3 anchor_goal = Vec3::Zero();

  std::size_t size() const { return end - begin; }
};

struct DemoTrajectory {
  TaskKind task = TaskKind::PickPlace;
  std::string source_id;
  double g_max = 0.08;
  std::vector<Waypoint> waypoints;
  std::vector<Segment> segments;

  std::span<const Waypoint> segment_waypoints(std::size_t i) const {
    const auto& s = segments.at(i);
    return std::span<const Waypoint>(waypoints).subspan(s.begin, s.size());
  }
};

/// Checks structural invariants (segment tiling, strictly increasing times,
/// gripper range, >= 2 waypoints per segment, positions inside the workspace
/// box grown by 0.2 m). Throws ValidationError naming the first offender.
void validate_demo(const DemoTrajectory& demo, const Workspace& ws = {});

DemoTrajectory parse_demo(const nlohmann::json& doc, const Workspace& ws = {});
DemoTrajectory parse_demo_text(const std::string& text, const Workspace& ws = {});
DemoTrajectory load_demo(const std::string& path, const Workspace& ws = {});

nlohmann::json demo_to_json(const DemoTrajectory& demo);

/// Thrown when a segment's transform cannot be synthesized; carries the segment index.
class SegmentError : public std::runtime_error {
 public:
  SegmentError(std::size_t segment, const std::string& what)
      : std::runtime_error("segment " + std::to_string(segment) + ": " + what), segment_(segment) {}
  std::size_t segment() const noexcept { return segment_; }

 private:
  std::size_t segment_;
};

struct AugmentedDemo {
  DemoTrajectory trajectory;
  std::vector<AffineTransform> transforms;  // one per segment
};

/// Warps each segment with the transform synthesized from its anchor pair.
/// Timing, gripper widths and segment boundaries are copied unchanged.
AugmentedDemo augment_segmentwise(const DemoTrajectory& demo, std::span<const AnchorPair> anchors,
                                  const GeometryTolerances& tol = {});

}  // namespace warpdemo
