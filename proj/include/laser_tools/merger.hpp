#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laser_tools/scan_convert.hpp"
#include "laser_tools/transform_tree.hpp"
#include "laser_tools/types.hpp"

namespace laser_tools {

/// Fills the unset fields of `spec` from the inputs: smallest angle_increment, smallest
/// range_min, largest range_max.
ScanGeometry resolve_merge_geometry(const GeometrySpec& spec, std::span<const LaserScan> inputs);

struct MergeConfig {
  FrameId destination_frame{"base_link"};
  GeometrySpec output_geometry;
  /// Identifiers of the input sources, in pairing order (file paths or stream channels).
  std::vector<std::string> inputs;
  bool emit_cloud = false;
  std::optional<HeightBand> height_band;

  friend bool operator==(const MergeConfig&, const MergeConfig&) = default;
};

struct MergeResult {
  LaserScan scan;
  /// Concatenated inputs in the destination frame with their true z; set when emit_cloud.
  std::optional<PointCloud3> cloud;
  DropStats stats;
  std::size_t skipped_beams = 0;
};

/// Re-expresses every input in the destination frame and bins the union as if measured from
/// the destination origin. No occlusion reasoning: whatever any input saw is kept.
///
/// All frame lookups are resolved before any binning. Throws FrameError naming the scan index
/// and frame on an unresolvable frame, std::invalid_argument for an empty input list.
MergeResult merge_scans(std::span<const LaserScan> scans, const TransformTree& tree, const MergeConfig& cfg);

}  // namespace laser_tools
