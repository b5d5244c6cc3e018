#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace warpdemo {

using Vec3 = Eigen::Vector3d;
using Rot3 = Eigen::Matrix3d;

/// World vertical. Every frame built here keeps this direction "up".
inline const Vec3& up_axis() {
  static const Vec3 z = Vec3::UnitZ();
  return z;
}

struct GeometryTolerances {
  double min_length = 1e-6;     // meters
  double min_vertical = 1e-4;   // radians away from +/- up
};

class GeometryError : public std::runtime_error {
 public:
  enum class Kind { DegenerateLength, DegenerateVertical };

  GeometryError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Similarity transform p -> scale * rotation * p + translation.
struct AffineTransform {
  double scale = 1.0;
  Rot3 rotation = Rot3::Identity();
  Vec3 translation = Vec3::Zero();
  // Set when one of the anchor vectors was too close to vertical for the
  // up constraint and the world x-axis was used as the reference instead.
  bool up_fallback = false;

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }

  /// [s*I t; 0 1] * [R 0; 0 1]
  Eigen::Matrix4d homogeneous() const;

  static AffineTransform identity() { return {}; }
};

/// Recorded and generated (start, goal) anchors for one segment.
struct AnchorPair {
  Vec3 recorded_start = Vec3::Zero();
  Vec3 recorded_goal = Vec3::Zero();
  Vec3 generated_start = Vec3::Zero();
  Vec3 generated_goal = Vec3::Zero();

  Vec3 recorded_delta() const { return recorded_goal - recorded_start; }
  Vec3 generated_delta() const { return generated_goal - generated_start; }
};

/// Orthonormal right-handed frame whose first column is v/|v| and whose second
/// column is the normalized projection of the world up axis onto the plane
/// orthogonal to v.
Rot3 frame_with_up(const Vec3& v, const GeometryTolerances& tol = {});

/// Like frame_with_up, but for near-vertical v the world x-axis stands in for
/// the up axis. `used_fallback` reports whether that happened.
Rot3 frame_with_up_or_fallback(const Vec3& v, bool& used_fallback, const GeometryTolerances& tol = {});

/// R = F(goal_delta) * F(recorded_delta)^T. Maps the recorded direction onto the
/// generated one and keeps the projection of up onto the plane normal to
/// goal_delta pointing the same way.
Rot3 rotation_from_anchors(const Vec3& recorded_delta, const Vec3& generated_delta,
                           const GeometryTolerances& tol = {});

double scale_from_anchors(const Vec3& recorded_delta, const Vec3& generated_delta,
                          const GeometryTolerances& tol = {});

/// t = g_s - s * R * r_s, so that the recorded start lands on the generated start.
Vec3 translation_from_anchors(const Vec3& generated_start, double scale, const Rot3& rotation,
                              const Vec3& recorded_start);

AffineTransform compose_transform(double scale, const Rot3& rotation, const Vec3& translation);

inline Vec3 apply(const AffineTransform& t, const Vec3& p) { return t.apply(p); }

/// Full synthesis from one anchor pair. Near-vertical anchors fall back to the
/// x-axis reference and set `up_fallback` instead of throwing; zero-length
/// anchors still throw DegenerateLength.
AffineTransform synthesize_transform(const AnchorPair& anchors, const GeometryTolerances& tol = {});

}  // namespace warpdemo
