#include "warpdemo/geometry.hpp"

#include <cmath>

namespace warpdemo {
namespace {

void require_length(const Vec3& v, const GeometryTolerances& tol, const char* what) {
  if (!(v.norm() > tol.min_length)) {
    throw GeometryError(GeometryError::Kind::DegenerateLength,
                        std::string(what) + ": vector length " + std::to_string(v.norm()) +
                            " is not above " + std::to_string(tol.min_length));
  }
}

// Angle between v and the nearest of +up/-up.
double angle_from_vertical(const Vec3& v) {
  return std::atan2(v.cross(up_axis()).norm(), std::abs(v.dot(up_axis())));
}

Rot3 frame_from_reference(const Vec3& v, const Vec3& reference) {
  const Vec3 x = v.normalized();
  const Vec3 y = (reference - reference.dot(x) * x).normalized();
  Rot3 f;
  f.col(0) = x;
  f.col(1) = y;
  f.col(2) = x.cross(y);
  return f;
}

}  // namespace

Eigen::Matrix4d AffineTransform::homogeneous() const {
  Eigen::Matrix4d scale_translate = Eigen::Matrix4d::Identity();
  scale_translate.topLeftCorner<3, 3>() *= scale;
  scale_translate.topRightCorner<3, 1>() = translation;
  Eigen::Matrix4d rot = Eigen::Matrix4d::Identity();
  rot.topLeftCorner<3, 3>() = rotation;
  return scale_translate * rot;
}

Rot3 frame_with_up(const Vec3& v, const GeometryTolerances& tol) {
  require_length(v, tol, "frame_with_up");
  if (angle_from_vertical(v) < tol.min_vertical) {
    throw GeometryError(GeometryError::Kind::DegenerateVertical,
                        "frame_with_up: vector is parallel to the vertical axis");
  }
  return frame_from_reference(v, up_axis());
}

Rot3 frame_with_up_or_fallback(const Vec3& v, bool& used_fallback, const GeometryTolerances& tol) {
  require_length(v, tol, "frame_with_up");
  used_fallback = angle_from_vertical(v) < tol.min_vertical;
  return frame_from_reference(v, used_fallback ? Vec3::UnitX() : up_axis());
}

Rot3 rotation_from_anchors(const Vec3& recorded_delta, const Vec3& generated_delta,
                           const GeometryTolerances& tol) {
  return frame_with_up(generated_delta, tol) * frame_with_up(recorded_delta, tol).transpose();
}

double scale_from_anchors(const Vec3& recorded_delta, const Vec3& generated_delta,
                          const GeometryTolerances& tol) {
  require_length(recorded_delta, tol, "scale_from_anchors");
  return generated_delta.norm() / recorded_delta.norm();
}

Vec3 translation_from_anchors(const Vec3& generated_start, double scale, const Rot3& rotation,
                              const Vec3& recorded_start) {
  return generated_start - scale * (rotation * recorded_start);
}

AffineTransform compose_transform(double scale, const Rot3& rotation, const Vec3& translation) {
  AffineTransform t;
  t.scale = scale;
  t.rotation = rotation;
  t.translation = translation;
  return t;
}

AffineTransform synthesize_transform(const AnchorPair& anchors, const GeometryTolerances& tol) {
  const Vec3 rd = anchors.recorded_delta();
  const Vec3 gd = anchors.generated_delta();
  require_length(rd, tol, "recorded anchors");
  require_length(gd, tol, "generated anchors");

  bool rec_fallback = false;
  bool gen_fallback = false;
  const Rot3 rec_frame = frame_with_up_or_fallback(rd, rec_fallback, tol);
  const Rot3 gen_frame = frame_with_up_or_fallback(gd, gen_fallback, tol);

  const Rot3 r = gen_frame * rec_frame.transpose();
  const double s = scale_from_anchors(rd, gd, tol);
  AffineTransform t = compose_transform(s, r, translation_from_anchors(anchors.generated_start, s, r,
                                                                       anchors.recorded_start));
  t.up_fallback = rec_fallback || gen_fallback;
  return t;
}

}  // namespace warpdemo
