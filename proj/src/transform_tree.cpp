#include "laser_tools/transform_tree.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "laser_tools/errors.hpp"

namespace laser_tools {

void TransformTree::add(const FrameId& parent, const FrameId& child, const RigidTransform& child_to_parent) {
  if (parent == child) {
    throw std::invalid_argument("transform from '" + parent.str() + "' to itself");
  }
  if (has_frame(parent) && has_frame(child)) {
    for (const Link& link : adjacency_.at(parent.str())) {
      if (link.neighbor == child.str()) {
        throw std::invalid_argument("duplicate transform between '" + parent.str() + "' and '" + child.str() +
                                    "'");
      }
    }
    if (connected(parent, child)) {
      throw std::invalid_argument("transform '" + parent.str() + "' -> '" + child.str() +
                                  "' would create a cycle");
    }
  }
  const std::size_t index = edges_.size();
  edges_.push_back({parent, child, child_to_parent});
  adjacency_[parent.str()].push_back({child.str(), index});
  adjacency_[child.str()].push_back({parent.str(), index});
}

void TransformTree::add_static_transform(const FrameId& parent, const FrameId& child, const Vec3& xyz,
                                         const Vec3& ypr) {
  add(parent, child, RigidTransform::from_xyz_ypr(xyz, ypr.x, ypr.y, ypr.z));
}

bool TransformTree::has_frame(const FrameId& frame) const { return adjacency_.contains(frame.str()); }

bool TransformTree::connected(const FrameId& a, const FrameId& b) const {
  if (a == b) return true;
  return !path(a.str(), b.str()).empty();
}

std::vector<FrameId> TransformTree::frames() const {
  std::vector<FrameId> out;
  out.reserve(adjacency_.size());
  for (const auto& [name, links] : adjacency_) out.emplace_back(name);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> TransformTree::path(const std::string& from, const std::string& to) const {
  if (!adjacency_.contains(from) || !adjacency_.contains(to)) return {};
  std::unordered_map<std::string, std::string> previous{{from, from}};
  std::deque<std::string> queue{from};
  while (!queue.empty() && !previous.contains(to)) {
    const std::string current = queue.front();
    queue.pop_front();
    for (const Link& link : adjacency_.at(current)) {
      if (previous.emplace(link.neighbor, current).second) queue.push_back(link.neighbor);
    }
  }
  if (!previous.contains(to)) return {};
  std::vector<std::string> out{to};
  while (out.back() != from) out.push_back(previous.at(out.back()));
  std::reverse(out.begin(), out.end());
  return out;
}

RigidTransform TransformTree::lookup(const FrameId& from, const FrameId& to) const {
  if (from == to) return RigidTransform::identity();
  for (const FrameId* f : {&from, &to}) {
    if (!has_frame(*f)) throw FrameError("unknown frame '" + f->str() + "'");
  }
  const std::vector<std::string> hops = path(from.str(), to.str());
  if (hops.empty()) {
    throw FrameError("frames '" + from.str() + "' and '" + to.str() + "' are not connected");
  }

  RigidTransform acc = RigidTransform::identity();
  for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
    const auto& links = adjacency_.at(hops[i]);
    const auto link = std::find_if(links.begin(), links.end(),
                                   [&](const Link& l) { return l.neighbor == hops[i + 1]; });
    const Edge& edge = edges_[link->edge];
    // Stepping child -> parent follows the stored direction; parent -> child inverts it.
    const RigidTransform step =
        edge.child.str() == hops[i] ? edge.child_to_parent : invert(edge.child_to_parent);
    acc = compose(step, acc);
  }
  return acc;
}

}  // namespace laser_tools
