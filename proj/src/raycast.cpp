#include "laser_tools/raycast.hpp"

#include <stdexcept>
#include <string>

namespace laser_tools {

namespace {

constexpr double kParallelEps = 1e-12;

double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

void check_wall(const Wall& w) {
  const bool finite = std::isfinite(w.p0.x) && std::isfinite(w.p0.y) && std::isfinite(w.p1.x) &&
                      std::isfinite(w.p1.y) && std::isfinite(w.z_lo) && std::isfinite(w.z_hi);
  if (!finite) throw std::invalid_argument("wall has non-finite coordinates");
  if (std::hypot(w.p1.x - w.p0.x, w.p1.y - w.p0.y) <= 1e-9) throw std::invalid_argument("degenerate wall");
  if (!(w.z_lo < w.z_hi)) throw std::invalid_argument("wall z_lo must be below z_hi");
}

}  // namespace

Scene::Scene(std::vector<Wall> walls) : walls_(std::move(walls)) {
  for (const Wall& w : walls_) check_wall(w);
}

void Scene::add(const Wall& wall) {
  check_wall(wall);
  walls_.push_back(wall);
}

std::optional<double> intersect_wall(const Wall& wall, const Vec3& origin, const Vec3& direction) {
  // origin + t d == p0 + s e, solved in the plane; t is the 3D distance since d is unit length.
  const double ex = wall.p1.x - wall.p0.x;
  const double ey = wall.p1.y - wall.p0.y;
  const double wx = wall.p0.x - origin.x;
  const double wy = wall.p0.y - origin.y;
  const double det = cross2(direction.x, direction.y, ex, ey);
  if (std::abs(det) < kParallelEps) return std::nullopt;
  const double t = cross2(wx, wy, ex, ey) / det;
  const double s = cross2(wx, wy, direction.x, direction.y) / det;
  if (t < 0.0 || s < 0.0 || s > 1.0) return std::nullopt;
  const double z = origin.z + t * direction.z;
  if (z < wall.z_lo || z > wall.z_hi) return std::nullopt;
  return t;
}

std::optional<double> Scene::cast(const Vec3& origin, const Vec3& unit_direction) const {
  std::optional<double> best;
  for (const Wall& w : walls_) {
    const auto t = intersect_wall(w, origin, unit_direction);
    if (t && (!best || *t < *best)) best = t;
  }
  return best;
}

LaserScan raycast_scan(const Scene& scene, const RigidTransform& sensor_in_world, const ScanGeometry& geometry,
                       const FrameId& frame) {
  geometry.validate();
  const std::size_t n = geometry.beam_count();
  std::vector<double> ranges(n, kNoReturn);
  const Vec3& origin = sensor_in_world.translation();
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = geometry.angle_min + static_cast<double>(i) * geometry.angle_increment;
    const Vec3 dir = sensor_in_world.rotation().rotate({std::cos(theta), std::sin(theta), 0.0});
    const auto t = scene.cast(origin, dir);
    if (t && *t >= geometry.range_min && *t <= geometry.range_max) ranges[i] = *t;
  }
  return LaserScan(frame, geometry, std::move(ranges));
}

PointCloud3 raycast_cloud(const Scene& scene, const RigidTransform& sensor_in_world, const ScanGeometry& geometry,
                          const std::vector<double>& elevations, const FrameId& frame) {
  geometry.validate();
  for (double phi : elevations) {
    if (!std::isfinite(phi)) throw std::invalid_argument("non-finite elevation");
  }
  const std::size_t n = geometry.beam_count();
  const Vec3& origin = sensor_in_world.translation();
  std::vector<Vec3> points;
  for (double phi : elevations) {
    for (std::size_t i = 0; i < n; ++i) {
      const double theta = geometry.angle_min + static_cast<double>(i) * geometry.angle_increment;
      const Vec3 local{std::cos(phi) * std::cos(theta), std::cos(phi) * std::sin(theta), std::sin(phi)};
      const auto t = scene.cast(origin, sensor_in_world.rotation().rotate(local));
      if (t && *t >= geometry.range_min && *t <= geometry.range_max) points.push_back(*t * local);
    }
  }
  return make_cloud_unchecked(frame, std::move(points));
}

}  // namespace laser_tools
