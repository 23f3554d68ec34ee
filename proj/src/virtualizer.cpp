#include "laser_tools/virtualizer.hpp"

#include <numbers>
#include <set>
#include <stdexcept>

#include "laser_tools/errors.hpp"

namespace laser_tools {

ScanGeometry default_virtual_geometry() {
  constexpr double kInc = std::numbers::pi / 360.0;
  return ScanGeometry::with_beam_count(-std::numbers::pi, kInc, 720, 0.0, 100.0);
}

void VirtualizerConfig::validate() const {
  if (virtual_frames.empty()) throw std::invalid_argument("virtual_frames must not be empty");
  std::set<FrameId> seen;
  for (const FrameId& f : virtual_frames) {
    if (!seen.insert(f).second) throw std::invalid_argument("duplicate virtual frame '" + f.str() + "'");
  }
  output_geometry.validate();
  if (height_band && !(height_band->z_min <= height_band->z_max)) {
    throw std::invalid_argument("height band lower bound exceeds upper bound");
  }
}

std::vector<VirtualScan> virtualize(const PointCloud3& cloud, const TransformTree& tree,
                                    const VirtualizerConfig& cfg) {
  cfg.validate();

  const auto resolve = [&](const FrameId& from, const FrameId& to) {
    try {
      return tree.lookup(from, to);
    } catch (const FrameError& e) {
      throw FrameError("virtual scan setup: " + std::string(e.what()));
    }
  };
  resolve(cloud.frame(), cfg.base_frame);
  std::vector<RigidTransform> cloud_to_virtual;
  cloud_to_virtual.reserve(cfg.virtual_frames.size());
  for (const FrameId& v : cfg.virtual_frames) {
    resolve(cfg.base_frame, v);
    cloud_to_virtual.push_back(resolve(cloud.frame(), v));
  }

  std::vector<VirtualScan> out;
  out.reserve(cfg.virtual_frames.size());
  for (std::size_t k = 0; k < cfg.virtual_frames.size(); ++k) {
    ScanBinner binner(cfg.output_geometry, cfg.height_band);
    binner.add_transformed(cloud.points(), cloud_to_virtual[k]);
    BinnedScan binned = binner.finish(cfg.virtual_frames[k]);
    out.push_back({cfg.virtual_frames[k], std::move(binned.scan), binned.stats});
  }
  return out;
}

}  // namespace laser_tools
