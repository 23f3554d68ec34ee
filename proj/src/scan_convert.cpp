#include "laser_tools/scan_convert.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace laser_tools {

ScanGeometry GeometrySpec::resolve(double default_increment, double default_range_min,
                                   double default_range_max) const {
  if (angle_min.has_value() != angle_max.has_value()) {
    throw std::invalid_argument("angle_min and angle_max must be given together");
  }
  const double inc = angle_increment.value_or(default_increment);
  const double rmin = range_min.value_or(default_range_min);
  const double rmax = range_max.value_or(default_range_max);
  if (angle_min) {
    ScanGeometry g{*angle_min, *angle_max, inc, rmin, rmax};
    g.validate();
    return g;
  }
  if (!(inc > 0.0) || !std::isfinite(inc)) throw std::invalid_argument("angle_increment must be positive");
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double fit = std::ceil(kTwoPi / inc - 1e-9);
  if (fit >= double(1 << 24)) throw std::invalid_argument("angle_increment too small");
  const auto beams = std::max<std::size_t>(static_cast<std::size_t>(fit), 1);
  return ScanGeometry::with_beam_count(-std::numbers::pi, inc, beams, rmin, rmax);
}

ScanPoints scan_to_points(const LaserScan& scan) {
  std::vector<Vec3> points;
  points.reserve(scan.size());
  std::size_t skipped = 0;
  const auto& ranges = scan.ranges();
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const double r = ranges[i];
    if (!std::isfinite(r) || r < scan.range_min() || r > scan.range_max()) {
      ++skipped;
      continue;
    }
    const double theta = scan.angle_min() + static_cast<double>(i) * scan.angle_increment();
    points.push_back({r * std::cos(theta), r * std::sin(theta), 0.0});
  }
  return {make_cloud_unchecked(scan.frame(), std::move(points)), skipped};
}

ScanBinner::ScanBinner(const ScanGeometry& geometry, std::optional<HeightBand> band)
    : geometry_(geometry), band_(band) {
  geometry_.validate();
  if (band_ && !(band_->z_min <= band_->z_max)) {
    throw std::invalid_argument("height band lower bound exceeds upper bound");
  }
  ranges_.assign(geometry_.beam_count(), kNoReturn);
}

long ScanBinner::bin_unwrapped(double bearing) const {
  const double t = (bearing - geometry_.angle_min) / geometry_.angle_increment;
  if (!(t >= -0.5) || !(t < static_cast<double>(ranges_.size()) + 0.5)) return -1;
  auto i = static_cast<long>(std::floor(t + 0.5));
  const auto n = static_cast<long>(ranges_.size());
  // The floor-based beam count can leave angle_max itself rounding one past the last bin.
  if (i == n && bearing <= geometry_.angle_max) i = n - 1;
  return (i >= 0 && i < n) ? i : -1;
}

long ScanBinner::bin_for_bearing(double bearing) const {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  long i = bin_unwrapped(bearing);
  if (i < 0) i = bin_unwrapped(bearing + kTwoPi);
  if (i < 0) i = bin_unwrapped(bearing - kTwoPi);
  return i;
}

void ScanBinner::add(const Vec3& p) {
  if (band_ && (p.z < band_->z_min || p.z > band_->z_max)) {
    ++stats_.height;
    return;
  }
  const double range = std::sqrt(p.x * p.x + p.y * p.y);
  if (range == 0.0 || range < geometry_.range_min) {
    ++stats_.range_low;
    return;
  }
  if (range > geometry_.range_max) {
    ++stats_.range_high;
    return;
  }
  const long i = bin_for_bearing(std::atan2(p.y, p.x));
  if (i < 0) {
    ++stats_.bearing;
    return;
  }
  double& slot = ranges_[static_cast<std::size_t>(i)];
  if (range < slot) slot = range;
  ++stats_.accepted;
}

BinnedScan ScanBinner::finish(const FrameId& frame) const {
  return {LaserScan(frame, geometry_, ranges_), stats_};
}

BinnedScan points_to_scan(const PointCloud3& cloud, const ScanGeometry& geometry, const FrameId& frame,
                          std::optional<HeightBand> band) {
  ScanBinner binner(geometry, band);
  binner.add(cloud.points());
  return binner.finish(frame);
}

PointCloud3 transform_cloud(const PointCloud3& cloud, const RigidTransform& t, const FrameId& new_frame) {
  std::vector<Vec3> out;
  out.reserve(cloud.size());
  for (const Vec3& p : cloud.points()) out.push_back(t.map(p));
  return PointCloud3(new_frame, std::move(out), PointCloud3::Trusted{});
}

}  // namespace laser_tools
