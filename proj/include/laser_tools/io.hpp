#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "laser_tools/merger.hpp"
#include "laser_tools/raycast.hpp"
#include "laser_tools/transform_tree.hpp"
#include "laser_tools/types.hpp"
#include "laser_tools/virtualizer.hpp"

namespace laser_tools::io {

// ---------------------------------------------------------------------------------------------
// Scans: one JSON object per scan, keys
//   frame, angle_min, angle_max, angle_increment, range_min, range_max, ranges
// written in that order on a single line. Numbers carry 17 significant digits so every double
// survives a round trip bit for bit; a no-return range is the string "inf".
// ---------------------------------------------------------------------------------------------

std::string format_scan(const LaserScan& scan);
/// Throws ParseError prefixed with `context` (file name, record number).
LaserScan parse_scan(std::string_view text, std::string_view context = "scan");

/// Scan plus the optional "source" key allowed on stream records.
struct ScanRecord {
  LaserScan scan;
  std::optional<std::string> source;
};
ScanRecord parse_scan_record(std::string_view text, std::string_view context);

LaserScan read_scan(const std::filesystem::path& path);
void write_scan(const std::filesystem::path& path, const LaserScan& scan);

/// Multi-record scan file: one scan object per line.
std::vector<LaserScan> read_scan_records(const std::filesystem::path& path);
void write_scan_records(const std::filesystem::path& path, std::span<const LaserScan> scans);

// ---------------------------------------------------------------------------------------------
// Clouds: ASCII PCD subset (FIELDS x y z, TYPE F, HEIGHT 1, DATA ascii) with the frame in a
// "# frame: <name>" comment. Clouds on streams use JSON: {"frame": ..., "points": [[x,y,z], ...]}.
// ---------------------------------------------------------------------------------------------

std::string format_cloud_pcd(const PointCloud3& cloud);
PointCloud3 parse_cloud_pcd(std::string_view text, std::string_view context = "cloud");
PointCloud3 read_cloud(const std::filesystem::path& path);
void write_cloud(const std::filesystem::path& path, const PointCloud3& cloud);

std::string format_cloud_json(const PointCloud3& cloud);
PointCloud3 parse_cloud_json(std::string_view text, std::string_view context = "cloud");

// ---------------------------------------------------------------------------------------------
// Configuration: sectioned key-value text.
//
//   [transforms]
//   laser_frame scan1 0 0 0 0 0.3 0          # parent child x y z yaw pitch roll [period_ms]
//   0 0 0 0 0.3 0 laser_frame scan2 1000     # static_transform_publisher argument order
//
//   [merge]
//   destination_frame = base_link
//   inputs = front.json rear.json
//   scan_output = merged.json
//   cloud_output = merged.pcd                # presence enables the debug cloud
//
//   [virtualize]
//   cloud_input = velodyne.pcd
//   base_frame = base_link
//   virtual_frames = scan1 scan2
//   combined_output = false
//   scan_output = virtual.json
//
// Both pipeline sections also accept angle_min, angle_max, angle_increment, range_min,
// range_max, height_min and height_max. Unknown sections or keys are errors.
// ---------------------------------------------------------------------------------------------

struct TransformEntry {
  FrameId parent;
  FrameId child;
  Vec3 xyz;
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;

  friend bool operator==(const TransformEntry&, const TransformEntry&) = default;
};

struct MergeSection {
  MergeConfig config;
  std::string scan_output;
  std::string cloud_output;

  friend bool operator==(const MergeSection&, const MergeSection&) = default;
};

struct VirtualizeSection {
  VirtualizerConfig config;
  /// Geometry keys exactly as written; config.output_geometry is their resolution.
  GeometrySpec geometry;
  std::string cloud_input;
  std::string scan_output;

  friend bool operator==(const VirtualizeSection&, const VirtualizeSection&) = default;
};

struct Config {
  std::vector<TransformEntry> transforms;
  TransformTree tree;
  std::optional<MergeSection> merge;
  std::optional<VirtualizeSection> virtualize;
};

/// Throws ConfigError with "<context>:<line>" or "<section>.<key>" location.
Config parse_config(std::string_view text, std::string_view context = "config");
Config read_config(const std::filesystem::path& path);
std::string format_config(const Config& config);

// ---------------------------------------------------------------------------------------------
// Scene files for the raycast oracle, one directive per line:
//   wall x0 y0 x1 y1 z_lo z_hi
//   geometry angle_min angle_max angle_increment range_min range_max   # applies to later sensors
//   scan  <frame> x y z yaw pitch roll
//   cloud <frame> x y z yaw pitch roll elevation...
// ---------------------------------------------------------------------------------------------

struct SensorSpec {
  FrameId frame;
  RigidTransform pose;
  ScanGeometry geometry;
  /// Empty for planar scans.
  std::vector<double> elevations;
  bool cloud = false;
};

struct SceneFile {
  Scene scene;
  std::vector<SensorSpec> sensors;
};

SceneFile parse_scene(std::string_view text, std::string_view context = "scene");
SceneFile read_scene(const std::filesystem::path& path);

// ---------------------------------------------------------------------------------------------

/// Decimal text with 17 significant digits; parses back to the identical double.
std::string format_double(double v);

/// Whole-file read; throws IoError naming the path.
std::string read_text(const std::filesystem::path& path);
/// Writes to a sibling temporary and renames it into place. Throws IoError naming the path.
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace laser_tools::io
