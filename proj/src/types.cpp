#include "laser_tools/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace laser_tools {

namespace {

// Upper bound on beams per scan; keeps a hostile geometry from requesting a multi-gigabyte
// ranges array.
constexpr double kMaxBeams = 1 << 24;

}  // namespace

Quaternion Quaternion::from_axis_angle(const Vec3& axis, double angle) {
  const double n = laser_tools::norm(axis);
  if (!(n > 0.0) || !std::isfinite(n) || !std::isfinite(angle)) {
    throw std::invalid_argument("axis-angle rotation needs a finite non-zero axis and finite angle");
  }
  const double s = std::sin(angle / 2.0) / n;
  return Quaternion{std::cos(angle / 2.0), axis.x * s, axis.y * s, axis.z * s}.normalized();
}

Quaternion Quaternion::from_ypr(double yaw, double pitch, double roll) {
  const Quaternion qz{std::cos(yaw / 2.0), 0.0, 0.0, std::sin(yaw / 2.0)};
  const Quaternion qy{std::cos(pitch / 2.0), 0.0, std::sin(pitch / 2.0), 0.0};
  const Quaternion qx{std::cos(roll / 2.0), std::sin(roll / 2.0), 0.0, 0.0};
  return (qz * qy * qx).normalized();
}

Quaternion Quaternion::normalized() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("cannot normalize a zero or non-finite quaternion");
  }
  // Canonical hemisphere w >= 0; q and -q are the same rotation.
  const double s = (w < 0.0 ? -1.0 : 1.0) / n;
  return {w * s, x * s, y * s, z * s};
}

Vec3 Quaternion::rotate(const Vec3& v) const {
  // v + 2w (u x v) + 2 u x (u x v), u = vector part
  const Vec3 u{x, y, z};
  const Vec3 uv = cross(u, v);
  const Vec3 uuv = cross(u, uv);
  return v + (2.0 * w) * uv + 2.0 * uuv;
}

Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

RigidTransform::RigidTransform(const Vec3& translation, const Quaternion& rotation)
    : translation_(translation), rotation_(rotation.normalized()) {
  if (!translation.finite()) throw std::invalid_argument("non-finite translation");
}

RigidTransform RigidTransform::from_translation(double x, double y, double z) {
  return RigidTransform({x, y, z}, Quaternion::identity());
}

RigidTransform RigidTransform::from_xyz_ypr(const Vec3& xyz, double yaw, double pitch, double roll) {
  if (!std::isfinite(yaw) || !std::isfinite(pitch) || !std::isfinite(roll)) {
    throw std::invalid_argument("non-finite Euler angle");
  }
  return RigidTransform(xyz, Quaternion::from_ypr(yaw, pitch, roll));
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return RigidTransform(a.rotation().rotate(b.translation()) + a.translation(),
                        a.rotation() * b.rotation());
}

RigidTransform invert(const RigidTransform& t) {
  const Quaternion inv = t.rotation().conjugate();
  return RigidTransform(-inv.rotate(t.translation()), inv);
}

Vec3 apply(const RigidTransform& t, const Vec3& p) {
  if (!p.finite()) throw std::invalid_argument("cannot transform a non-finite point");
  return t.map(p);
}

FrameId::FrameId(std::string name) : name_(std::move(name)) {
  if (name_.empty()) throw std::invalid_argument("frame id must not be empty");
  const auto ws = [](unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); };
  if (std::any_of(name_.begin(), name_.end(), ws)) {
    throw std::invalid_argument("frame id '" + name_ + "' contains whitespace");
  }
}

void ScanGeometry::validate() const {
  const auto fail = [](const std::string& what) { throw std::invalid_argument("invalid scan geometry: " + what); };
  if (!std::isfinite(angle_min) || !std::isfinite(angle_max) || !std::isfinite(angle_increment)) {
    fail("non-finite angle parameter");
  }
  if (!std::isfinite(range_min) || !std::isfinite(range_max)) fail("non-finite range bound");
  if (!(angle_increment > 0.0)) fail("angle_increment must be positive");
  if (!(angle_max >= angle_min)) fail("angle_max must not be below angle_min");
  if (angle_max - angle_min > 2.0 * std::numbers::pi + 1e-9) fail("angular span exceeds a full turn");
  if (!(range_min >= 0.0)) fail("range_min must be non-negative");
  if (!(range_min < range_max)) fail("range_min must be below range_max");
  if ((angle_max - angle_min) / angle_increment >= kMaxBeams) fail("too many beams");
}

std::size_t ScanGeometry::beam_count() const {
  return static_cast<std::size_t>(std::floor((angle_max - angle_min) / angle_increment)) + 1;
}

ScanGeometry ScanGeometry::with_beam_count(double angle_min, double angle_increment, std::size_t beams,
                                           double range_min, double range_max) {
  if (beams == 0) throw std::invalid_argument("a scan needs at least one beam");
  ScanGeometry g{angle_min, angle_min + static_cast<double>(beams - 1) * angle_increment, angle_increment,
                 range_min, range_max};
  g.validate();
  // The quotient in beam_count() is off by a few ulps of the largest magnitude involved, which
  // can be far coarser than the ulp of angle_max itself when angle_max is near zero.
  const double step =
      std::max({std::abs(angle_min), std::abs(g.angle_max), angle_increment}) * std::numeric_limits<double>::epsilon();
  for (int guard = 0; guard < 64 && g.beam_count() != beams; ++guard) {
    g.angle_max += g.beam_count() < beams ? step : -step;
  }
  if (g.beam_count() != beams) throw std::invalid_argument("cannot represent requested beam count");
  g.validate();
  return g;
}

LaserScan::LaserScan(FrameId frame, const ScanGeometry& geometry, std::vector<double> ranges)
    : frame_(std::move(frame)), geometry_(geometry), ranges_(std::move(ranges)) {
  geometry_.validate();
  const std::size_t expected = geometry_.beam_count();
  if (ranges_.size() != expected) {
    throw std::invalid_argument("scan has " + std::to_string(ranges_.size()) + " ranges, geometry implies " +
                                std::to_string(expected));
  }
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    double& r = ranges_[i];
    if (std::isnan(r)) throw std::invalid_argument("NaN range at beam " + std::to_string(i));
    if (r < geometry_.range_min || r > geometry_.range_max) r = kNoReturn;
  }
}

double beam_angle(const LaserScan& scan, std::size_t i) {
  if (i >= scan.size()) {
    throw std::out_of_range("beam index " + std::to_string(i) + " out of range for scan of " +
                            std::to_string(scan.size()) + " beams");
  }
  return scan.angle_min() + static_cast<double>(i) * scan.angle_increment();
}

PointCloud3::PointCloud3(FrameId frame, std::vector<Vec3> points)
    : frame_(std::move(frame)), points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].finite()) throw std::invalid_argument("non-finite point at index " + std::to_string(i));
  }
}

PointCloud3 make_cloud_unchecked(FrameId frame, std::vector<Vec3> points) {
  return PointCloud3(std::move(frame), std::move(points), PointCloud3::Trusted{});
}

}  // namespace laser_tools
