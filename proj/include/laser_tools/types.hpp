#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace laser_tools {

/// Sentinel stored in LaserScan::ranges for beams with no return.
inline constexpr double kNoReturn = std::numeric_limits<double>::infinity();

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Hamilton quaternion (w, x, y, z). Instances held by RigidTransform are unit length.
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Quaternion identity() { return {}; }
  static Quaternion from_axis_angle(const Vec3& axis, double angle);
  /// Intrinsic Z-Y-X rotation: yaw about z, then pitch about the new y, then roll about the new x.
  static Quaternion from_ypr(double yaw, double pitch, double roll);

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  Quaternion normalized() const;
  Quaternion conjugate() const { return {w, -x, -y, -z}; }
  Vec3 rotate(const Vec3& v) const;

  friend Quaternion operator*(const Quaternion& a, const Quaternion& b);
  friend bool operator==(const Quaternion&, const Quaternion&) = default;
};

/// Proper rigid motion: p -> R p + t.
class RigidTransform {
 public:
  RigidTransform() = default;
  /// Normalizes the rotation; throws std::invalid_argument for a zero or non-finite quaternion
  /// or a non-finite translation.
  RigidTransform(const Vec3& translation, const Quaternion& rotation);

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(double x, double y, double z);
  static RigidTransform from_xyz_ypr(const Vec3& xyz, double yaw, double pitch, double roll);

  const Vec3& translation() const { return translation_; }
  const Quaternion& rotation() const { return rotation_; }

  /// Unchecked SE(3) action. Callers guarantee a finite input.
  Vec3 map(const Vec3& p) const { return rotation_.rotate(p) + translation_; }

  friend bool operator==(const RigidTransform&, const RigidTransform&) = default;

 private:
  Vec3 translation_{};
  Quaternion rotation_{};
};

/// Returns a ∘ b, i.e. apply(compose(a, b), p) == apply(a, apply(b, p)).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& t);
/// Throws std::invalid_argument when p has a non-finite coordinate.
Vec3 apply(const RigidTransform& t, const Vec3& p);

/// Named coordinate frame. Non-empty, no whitespace, compared bytewise.
class FrameId {
 public:
  explicit FrameId(std::string name);

  const std::string& str() const { return name_; }

  friend bool operator==(const FrameId&, const FrameId&) = default;
  friend auto operator<=>(const FrameId&, const FrameId&) = default;

 private:
  std::string name_;
};

/// Angular and range parameterization of a planar scan.
struct ScanGeometry {
  double angle_min = 0.0;
  double angle_max = 0.0;
  double angle_increment = 0.0;
  double range_min = 0.0;
  double range_max = 0.0;

  /// Throws std::invalid_argument when any invariant fails.
  void validate() const;
  /// floor((angle_max - angle_min) / angle_increment) + 1
  std::size_t beam_count() const;

  /// Geometry of exactly `beams` beams starting at angle_min. angle_max is nudged up by
  /// ulps when needed so that beam_count() reproduces `beams` under the floor formula.
  static ScanGeometry with_beam_count(double angle_min, double angle_increment, std::size_t beams,
                                      double range_min, double range_max);

  friend bool operator==(const ScanGeometry&, const ScanGeometry&) = default;
};

/// Planar range scan.
///
/// Ranges outside [range_min, range_max] (and -inf) are stored as kNoReturn. NaN ranges are
/// rejected with std::invalid_argument, as is a ranges array whose length disagrees with the
/// beam-count formula.
class LaserScan {
 public:
  LaserScan(FrameId frame, const ScanGeometry& geometry, std::vector<double> ranges);

  const FrameId& frame() const { return frame_; }
  const ScanGeometry& geometry() const { return geometry_; }
  const std::vector<double>& ranges() const { return ranges_; }
  std::size_t size() const { return ranges_.size(); }

  double angle_min() const { return geometry_.angle_min; }
  double angle_max() const { return geometry_.angle_max; }
  double angle_increment() const { return geometry_.angle_increment; }
  double range_min() const { return geometry_.range_min; }
  double range_max() const { return geometry_.range_max; }

  friend bool operator==(const LaserScan&, const LaserScan&) = default;

 private:
  FrameId frame_;
  ScanGeometry geometry_;
  std::vector<double> ranges_;
};

/// angle_min + i * angle_increment; throws std::out_of_range for i >= size.
double beam_angle(const LaserScan& scan, std::size_t i);

/// Frame-tagged set of finite 3D points.
class PointCloud3 {
 public:
  /// Throws std::invalid_argument naming the first non-finite point.
  PointCloud3(FrameId frame, std::vector<Vec3> points);

  const FrameId& frame() const { return frame_; }
  const std::vector<Vec3>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  friend bool operator==(const PointCloud3&, const PointCloud3&) = default;

 private:
  struct Trusted {};
  PointCloud3(FrameId frame, std::vector<Vec3> points, Trusted)
      : frame_(std::move(frame)), points_(std::move(points)) {}
  friend PointCloud3 transform_cloud(const PointCloud3&, const RigidTransform&, const FrameId&);
  friend PointCloud3 make_cloud_unchecked(FrameId, std::vector<Vec3>);

  FrameId frame_;
  std::vector<Vec3> points_;
};

/// For producers that construct points from already-finite data (scan expansion, raycasts).
PointCloud3 make_cloud_unchecked(FrameId frame, std::vector<Vec3> points);

}  // namespace laser_tools

template <>
struct std::hash<laser_tools::FrameId> {
  std::size_t operator()(const laser_tools::FrameId& f) const noexcept {
    return std::hash<std::string>{}(f.str());
  }
};
