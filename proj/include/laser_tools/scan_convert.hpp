#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "laser_tools/types.hpp"

namespace laser_tools {

/// Per-conversion accounting: every input point is either accepted into a bin or counted
/// under exactly one drop reason.
struct DropStats {
  std::size_t accepted = 0;
  std::size_t bearing = 0;
  std::size_t range_low = 0;
  std::size_t range_high = 0;
  std::size_t height = 0;

  std::size_t dropped() const { return bearing + range_low + range_high + height; }
  std::size_t total() const { return accepted + dropped(); }

  DropStats& operator+=(const DropStats& o) {
    accepted += o.accepted;
    bearing += o.bearing;
    range_low += o.range_low;
    range_high += o.range_high;
    height += o.height;
    return *this;
  }
  friend bool operator==(const DropStats&, const DropStats&) = default;
};

/// Optional z pre-filter applied before flattening. Off unless explicitly configured.
struct HeightBand {
  double z_min = 0.0;
  double z_max = 0.0;
  friend bool operator==(const HeightBand&, const HeightBand&) = default;
};

/// Partially specified scan geometry, as read from configuration.
struct GeometrySpec {
  std::optional<double> angle_min;
  std::optional<double> angle_max;
  std::optional<double> angle_increment;
  std::optional<double> range_min;
  std::optional<double> range_max;

  /// Fills unset fields from the given defaults. With neither angle bound set the result spans
  /// the half-open full turn [-π, π): as many beams as fit strictly below +π. Setting only one
  /// angle bound is an error. Throws std::invalid_argument for an invalid result.
  ScanGeometry resolve(double default_increment, double default_range_min, double default_range_max) const;

  friend bool operator==(const GeometrySpec&, const GeometrySpec&) = default;
};

struct ScanPoints {
  PointCloud3 cloud;
  std::size_t skipped_beams = 0;
};

struct BinnedScan {
  LaserScan scan;
  DropStats stats;
};

/// Expands every finite beam to (r cos θ, r sin θ, 0) in the scan's own frame.
ScanPoints scan_to_points(const LaserScan& scan);

/// Accumulates points into the minimum-range angular bins of one output scan.
///
/// Points are flattened onto the x-y plane. Range checks run first: (0, 0) and anything below
/// range_min count as range_low, anything above range_max as range_high. The bearing then
/// selects bin round((bearing - angle_min) / angle_increment), round-half-up. A bearing may
/// overshoot either end by up to half an increment and still land in the edge bin; a bearing
/// that misses is retried shifted by ±2π before it is dropped. Each bin keeps the minimum
/// range, which makes the result independent of insertion order.
class ScanBinner {
 public:
  /// Throws std::invalid_argument for an invalid geometry or an inverted height band.
  explicit ScanBinner(const ScanGeometry& geometry, std::optional<HeightBand> band = std::nullopt);

  void add(const Vec3& p);
  void add(const std::vector<Vec3>& points) {
    for (const Vec3& p : points) add(p);
  }
  /// Adds t.map(p) for each point without materializing the transformed cloud.
  void add_transformed(const std::vector<Vec3>& points, const RigidTransform& t) {
    for (const Vec3& p : points) add(t.map(p));
  }

  /// Bin index for a bearing, or -1 when it falls outside the geometry.
  long bin_for_bearing(double bearing) const;

  const std::vector<double>& ranges() const { return ranges_; }
  const DropStats& stats() const { return stats_; }
  BinnedScan finish(const FrameId& frame) const;

 private:
  long bin_unwrapped(double bearing) const;

  ScanGeometry geometry_;
  std::optional<HeightBand> band_;
  std::vector<double> ranges_;
  DropStats stats_;
};

/// Flattens and bins a cloud already expressed in the target scan frame.
BinnedScan points_to_scan(const PointCloud3& cloud, const ScanGeometry& geometry, const FrameId& frame,
                          std::optional<HeightBand> band = std::nullopt);

PointCloud3 transform_cloud(const PointCloud3& cloud, const RigidTransform& t, const FrameId& new_frame);

}  // namespace laser_tools
