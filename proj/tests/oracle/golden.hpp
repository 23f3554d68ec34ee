#pragma once

// Helpers for the committed golden files under tests/data.

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "laser_tools/io.hpp"
#include "oracle.hpp"

namespace golden {

/// Pose of every configured frame in its tree root, chained from the raw config entries with
/// 4x4 matrices.
inline std::map<std::string, oracle::Mat4> root_poses(const std::vector<laser_tools::io::TransformEntry>& entries) {
  std::map<std::string, oracle::Mat4> pose;
  std::map<std::string, const laser_tools::io::TransformEntry*> parent_of;
  for (const auto& e : entries) parent_of[e.child.str()] = &e;
  for (const auto& e : entries) {
    for (const std::string& start : {e.parent.str(), e.child.str()}) {
      oracle::Mat4 m = oracle::Mat4::Identity();
      std::string f = start;
      while (parent_of.count(f)) {
        const auto* edge = parent_of[f];
        m = oracle::homogeneous({edge->xyz.x, edge->xyz.y, edge->xyz.z}, edge->yaw, edge->pitch, edge->roll) * m;
        f = edge->parent.str();
      }
      pose[start] = m;
    }
  }
  return pose;
}

/// Maps coordinates in `from` to coordinates in `to`.
inline oracle::Mat4 between(const std::map<std::string, oracle::Mat4>& poses, const std::string& from,
                            const std::string& to) {
  return poses.at(to).inverse() * poses.at(from);
}

/// Empty when the scans agree: same frame and geometry, ranges within `tol`, no-returns aligned.
inline std::string compare_scans(const laser_tools::LaserScan& got, const laser_tools::LaserScan& want, double tol) {
  std::ostringstream why;
  if (got.frame() != want.frame()) {
    why << "frame " << got.frame().str() << " != " << want.frame().str();
  } else if (got.geometry().angle_min != want.geometry().angle_min ||
             got.geometry().angle_max != want.geometry().angle_max ||
             got.geometry().angle_increment != want.geometry().angle_increment ||
             got.geometry().range_min != want.geometry().range_min ||
             got.geometry().range_max != want.geometry().range_max) {
    why << "geometry differs";
  } else if (got.size() != want.size()) {
    why << "size " << got.size() << " != " << want.size();
  } else {
    for (std::size_t i = 0; i < got.size(); ++i) {
      const double a = got.ranges()[i], b = want.ranges()[i];
      const bool ok = (std::isinf(a) && std::isinf(b)) || std::abs(a - b) <= tol;
      if (!ok) {
        why << "beam " << i << ": " << a << " vs " << b;
        break;
      }
    }
  }
  return why.str();
}

}  // namespace golden
