#pragma once

#include <optional>
#include <vector>

#include "laser_tools/scan_convert.hpp"
#include "laser_tools/transform_tree.hpp"
#include "laser_tools/types.hpp"

namespace laser_tools {

/// Full turn [-π, π) at 0.5° with ranges [0, 100] m.
ScanGeometry default_virtual_geometry();

struct VirtualizerConfig {
  /// Hub frame every virtual frame must be reachable from. May equal the cloud frame.
  FrameId base_frame{"base_link"};
  std::vector<FrameId> virtual_frames;
  /// All scans go to one tagged stream instead of one output per frame. No geometric fusion.
  bool combined_output = false;
  ScanGeometry output_geometry = default_virtual_geometry();
  std::optional<HeightBand> height_band;

  /// Throws std::invalid_argument for an empty or duplicated frame list or a bad geometry.
  void validate() const;

  friend bool operator==(const VirtualizerConfig&, const VirtualizerConfig&) = default;
};

struct VirtualScan {
  FrameId frame;
  LaserScan scan;
  DropStats stats;
};

/// One planar scan per virtual frame, in config order, ignoring occlusions between the cloud's
/// acquisition viewpoint and the virtual one.
///
/// Every transform (cloud -> base, base -> each virtual frame) is resolved before any scan is
/// produced; a FrameError leaves no partial result.
std::vector<VirtualScan> virtualize(const PointCloud3& cloud, const TransformTree& tree,
                                    const VirtualizerConfig& cfg);

}  // namespace laser_tools
