#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "laser_tools/types.hpp"

namespace laser_tools {

/// Static transform graph restricted to a forest (no undirected cycles).
///
/// Each edge stores the transform mapping child-frame coordinates into parent-frame
/// coordinates, the same convention as a static transform publisher's "parent child" pair.
/// Mutation is single-threaded; const lookups may run concurrently once building is done.
class TransformTree {
 public:
  struct Edge {
    FrameId parent;
    FrameId child;
    RigidTransform child_to_parent;
  };

  /// Throws std::invalid_argument when parent == child, or when the pair already has an edge
  /// (in either direction) or the edge would close a cycle.
  void add(const FrameId& parent, const FrameId& child, const RigidTransform& child_to_parent);

  /// Edge from translation xyz (m) and yaw-pitch-roll ypr = (yaw, pitch, roll) (rad).
  void add_static_transform(const FrameId& parent, const FrameId& child, const Vec3& xyz, const Vec3& ypr);

  bool has_frame(const FrameId& frame) const;
  bool connected(const FrameId& a, const FrameId& b) const;

  /// Transform mapping points expressed in `from` into `to`. lookup(f, f) is the identity,
  /// even for frames the tree has never seen. Throws FrameError otherwise.
  RigidTransform lookup(const FrameId& from, const FrameId& to) const;

  const std::vector<Edge>& edges() const { return edges_; }
  std::vector<FrameId> frames() const;

 private:
  struct Link {
    std::string neighbor;
    std::size_t edge;
  };

  // Frames on the path from `from` to `to`, both inclusive; empty if disconnected.
  std::vector<std::string> path(const std::string& from, const std::string& to) const;

  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::vector<Link>> adjacency_;
};

}  // namespace laser_tools
