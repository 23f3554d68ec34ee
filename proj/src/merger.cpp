#include "laser_tools/merger.hpp"

#include <algorithm>
#include <stdexcept>

#include "laser_tools/errors.hpp"

namespace laser_tools {

ScanGeometry resolve_merge_geometry(const GeometrySpec& spec, std::span<const LaserScan> inputs) {
  if (inputs.empty()) return spec.resolve(0.0, 0.0, 0.0);
  double inc = inputs.front().angle_increment();
  double rmin = inputs.front().range_min();
  double rmax = inputs.front().range_max();
  for (const LaserScan& s : inputs) {
    inc = std::min(inc, s.angle_increment());
    rmin = std::min(rmin, s.range_min());
    rmax = std::max(rmax, s.range_max());
  }
  return spec.resolve(inc, rmin, rmax);
}

MergeResult merge_scans(std::span<const LaserScan> scans, const TransformTree& tree, const MergeConfig& cfg) {
  if (scans.empty()) throw std::invalid_argument("merge needs at least one input scan");

  std::vector<RigidTransform> to_destination;
  to_destination.reserve(scans.size());
  for (std::size_t k = 0; k < scans.size(); ++k) {
    try {
      to_destination.push_back(tree.lookup(scans[k].frame(), cfg.destination_frame));
    } catch (const FrameError& e) {
      throw FrameError("input scan " + std::to_string(k) + " (frame '" + scans[k].frame().str() +
                       "'): " + e.what());
    }
  }

  const ScanGeometry geometry = resolve_merge_geometry(cfg.output_geometry, scans);
  ScanBinner binner(geometry, cfg.height_band);
  std::vector<Vec3> merged_points;
  std::size_t skipped = 0;

  for (std::size_t k = 0; k < scans.size(); ++k) {
    ScanPoints expanded = scan_to_points(scans[k]);
    skipped += expanded.skipped_beams;
    const std::vector<Vec3>& local = expanded.cloud.points();
    if (scans[k].frame() == cfg.destination_frame) {
      binner.add(local);
      if (cfg.emit_cloud) merged_points.insert(merged_points.end(), local.begin(), local.end());
    } else {
      const RigidTransform& t = to_destination[k];
      for (const Vec3& p : local) {
        const Vec3 q = t.map(p);
        binner.add(q);
        if (cfg.emit_cloud) merged_points.push_back(q);
      }
    }
  }

  BinnedScan binned = binner.finish(cfg.destination_frame);
  std::optional<PointCloud3> cloud;
  if (cfg.emit_cloud) cloud = make_cloud_unchecked(cfg.destination_frame, std::move(merged_points));
  return {std::move(binned.scan), std::move(cloud), binned.stats, skipped};
}

}  // namespace laser_tools
