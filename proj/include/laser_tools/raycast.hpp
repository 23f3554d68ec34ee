#pragma once

#include <optional>
#include <vector>

#include "laser_tools/types.hpp"

namespace laser_tools {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Vertical rectangle standing on segment p0-p1 between heights z_lo and z_hi.
struct Wall {
  Point2 p0;
  Point2 p1;
  double z_lo = 0.0;
  double z_hi = 1.0;
};

/// Synthetic world of vertical walls used as ground truth.
class Scene {
 public:
  Scene() = default;
  /// Throws std::invalid_argument for a degenerate wall (length <= 1e-9, z_lo >= z_hi, non-finite).
  explicit Scene(std::vector<Wall> walls);

  void add(const Wall& wall);
  const std::vector<Wall>& walls() const { return walls_; }

  /// Distance along the unit ray from `origin` to the nearest wall, or nullopt. Hits on
  /// segment endpoints or z limits count (closed intervals).
  std::optional<double> cast(const Vec3& origin, const Vec3& unit_direction) const;

 private:
  std::vector<Wall> walls_;
};

/// Closed-form distance from `origin` along unit `direction` to one wall. A ray whose planar
/// projection is parallel to the wall (|cross| < 1e-12) never hits.
std::optional<double> intersect_wall(const Wall& wall, const Vec3& origin, const Vec3& direction);

/// Ground-truth planar scan from a sensor at `sensor_in_world`. Beams lie in the sensor's own
/// x-y plane. Nearest hits outside [range_min, range_max] yield kNoReturn.
LaserScan raycast_scan(const Scene& scene, const RigidTransform& sensor_in_world, const ScanGeometry& geometry,
                       const FrameId& frame);

/// Multi-plane cloud: for every elevation φ and beam bearing θ, the ray
/// (cos φ cos θ, cos φ sin θ, sin φ) in sensor coordinates. Hits within the range bounds are
/// returned in the sensor frame.
PointCloud3 raycast_cloud(const Scene& scene, const RigidTransform& sensor_in_world, const ScanGeometry& geometry,
                          const std::vector<double>& elevations, const FrameId& frame);

}  // namespace laser_tools
