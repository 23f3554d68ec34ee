#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "laser_tools/errors.hpp"
#include "laser_tools/raycast.hpp"
#include "laser_tools/virtualizer.hpp"
#include "oracle.hpp"

using namespace laser_tools;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Vec3> random_points(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-15.0, 15.0), h(-2.0, 3.0);
  std::vector<Vec3> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), h(rng)};
  return pts;
}

void expect_ranges_near(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (std::isinf(want[i])) {
      ASSERT_TRUE(std::isinf(got[i])) << "bin " << i << " got " << got[i];
    } else {
      ASSERT_NEAR(got[i], want[i], tol) << "bin " << i;
    }
  }
}

VirtualizerConfig config_for(std::vector<FrameId> frames, FrameId base) {
  VirtualizerConfig cfg;
  cfg.base_frame = std::move(base);
  cfg.virtual_frames = std::move(frames);
  return cfg;
}

}  // namespace

TEST(Virtualize, DefaultGeometry) {
  const ScanGeometry g = default_virtual_geometry();
  EXPECT_EQ(g.angle_min, -kPi);
  EXPECT_EQ(g.beam_count(), 720u);
  EXPECT_EQ(g.range_min, 0.0);
  EXPECT_EQ(g.range_max, 100.0);
}

TEST(Virtualize, IdentityFrameFlattensTheCloud) {
  TransformTree tree;
  tree.add_static_transform(FrameId("base_link"), FrameId("velodyne"), {0, 0, 0}, {0, 0, 0});
  const PointCloud3 cloud(FrameId("velodyne"), {{2, 0, 1.0}, {0, 3, -0.5}, {-4, 0, 0}});
  const auto out = virtualize(cloud, tree, config_for({FrameId("base_link")}, FrameId("base_link")));
  ASSERT_EQ(out.size(), 1u);
  const LaserScan& s = out[0].scan;
  EXPECT_EQ(s.frame(), FrameId("base_link"));
  ScanBinner probe(s.geometry());
  EXPECT_EQ(s.ranges()[static_cast<std::size_t>(probe.bin_for_bearing(0.0))], 2.0);
  EXPECT_EQ(s.ranges()[static_cast<std::size_t>(probe.bin_for_bearing(kPi / 2))], 3.0);
  EXPECT_EQ(s.ranges()[static_cast<std::size_t>(probe.bin_for_bearing(kPi))], 4.0);
  EXPECT_EQ(out[0].stats.accepted, 3u);
}

TEST(Virtualize, PitchedVirtualFrameMatchesMatrixOracle) {
  std::mt19937_64 rng(51);
  TransformTree tree;
  tree.add_static_transform(FrameId("laser_frame"), FrameId("scan1"), {0, 0, 0}, {0, 0.3, 0});
  const auto pts = random_points(rng, 10000);
  const PointCloud3 cloud(FrameId("laser_frame"), pts);
  const auto out = virtualize(cloud, tree, config_for({FrameId("scan1")}, FrameId("laser_frame")));

  // Edge maps scan1 coordinates into laser_frame, so the cloud moves by its inverse.
  const oracle::Mat4 to_virtual = oracle::homogeneous(oracle::Vec::Zero(), 0, 0.3, 0).inverse();
  std::vector<Vec3> moved;
  for (const Vec3& p : pts) {
    const oracle::Vec q = oracle::transform(to_virtual, oracle::to_eigen(p));
    moved.push_back({q.x(), q.y(), q.z()});
  }
  const BinnedScan expected =
      points_to_scan(PointCloud3(FrameId("scan1"), moved), default_virtual_geometry(), FrameId("scan1"));
  expect_ranges_near(out[0].scan.ranges(), expected.scan.ranges(), 1e-9);
}

TEST(Virtualize, ChainedFramesAgreeWithDirectEdge) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const oracle::Pose p1 = oracle::random_pose(rng, 1.0), p2 = oracle::random_pose(rng, 1.0),
                       p3 = oracle::random_pose(rng, 1.0);
    auto edge = [](TransformTree& t, const char* parent, const char* child, const oracle::Pose& p) {
      t.add_static_transform(FrameId(parent), FrameId(child), {p.xyz.x(), p.xyz.y(), p.xyz.z()},
                             {p.yaw, p.pitch, p.roll});
    };
    TransformTree chained;
    edge(chained, "base_link", "a", p1);
    edge(chained, "a", "b", p2);
    edge(chained, "b", "v", p3);

    const oracle::Mat4 direct_m = p1.matrix() * p2.matrix() * p3.matrix();
    const Eigen::Matrix3d r = direct_m.topLeftCorner<3, 3>();
    const Eigen::Quaterniond q(r);
    TransformTree direct;
    direct.add(FrameId("base_link"), FrameId("v"),
               RigidTransform({direct_m(0, 3), direct_m(1, 3), direct_m(2, 3)}, Quaternion{q.w(), q.x(), q.y(), q.z()}));

    const PointCloud3 cloud(FrameId("base_link"), random_points(rng, 5000));
    const auto cfg = config_for({FrameId("v")}, FrameId("base_link"));
    const auto a = virtualize(cloud, chained, cfg);
    const auto b = virtualize(cloud, direct, cfg);
    expect_ranges_near(a[0].scan.ranges(), b[0].scan.ranges(), 1e-9);
  }
}

TEST(Virtualize, CombinedFlagDoesNotChangeScans) {
  std::mt19937_64 rng(53);
  TransformTree tree;
  tree.add_static_transform(FrameId("base_link"), FrameId("scan1"), {0.5, 0, 0.2}, {0.1, 0, 0});
  tree.add_static_transform(FrameId("base_link"), FrameId("scan2"), {-0.5, 0, 0.2}, {kPi, 0, 0});
  tree.add_static_transform(FrameId("base_link"), FrameId("velodyne"), {0, 0, 1.5}, {0, 0, 0});
  const PointCloud3 cloud(FrameId("velodyne"), random_points(rng, 3000));
  auto cfg = config_for({FrameId("scan1"), FrameId("scan2")}, FrameId("base_link"));
  const auto separate = virtualize(cloud, tree, cfg);
  cfg.combined_output = true;
  const auto combined = virtualize(cloud, tree, cfg);
  ASSERT_EQ(separate.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(separate[k].frame, cfg.virtual_frames[k]);
    EXPECT_EQ(separate[k].scan.ranges(), combined[k].scan.ranges());
  }
}

TEST(Virtualize, ConfigErrors) {
  TransformTree tree;
  tree.add_static_transform(FrameId("base_link"), FrameId("scan1"), {0, 0, 0}, {0, 0, 0});
  const PointCloud3 cloud(FrameId("base_link"), {{1, 0, 0}});
  EXPECT_THROW(virtualize(cloud, tree, config_for({}, FrameId("base_link"))), std::invalid_argument);
  EXPECT_THROW(virtualize(cloud, tree, config_for({FrameId("scan1"), FrameId("scan1")}, FrameId("base_link"))),
               std::invalid_argument);
  try {
    virtualize(cloud, tree, config_for({FrameId("scan1"), FrameId("scan9")}, FrameId("base_link")));
    FAIL();
  } catch (const FrameError& e) {
    EXPECT_NE(std::string(e.what()).find("scan9"), std::string::npos);
  }
  EXPECT_THROW(virtualize(cloud, tree, config_for({FrameId("scan1")}, FrameId("odom"))), FrameError);
  const PointCloud3 stray(FrameId("lidar"), {{1, 0, 0}});
  EXPECT_THROW(virtualize(stray, tree, config_for({FrameId("scan1")}, FrameId("base_link"))), FrameError);
}

TEST(VirtualizeLimitations, VirtualOriginSeesPastTheBody) {
  // Vehicle body blocks the view to the left from a virtual sensor on its right side. A
  // scanner on the left sees the wall beyond; virtualizing at the right side keeps those
  // returns although the body would hide the wall there.
  Scene scene;
  scene.add(Wall{{-2, 1}, {2, 1}, 0, 1.5});
  scene.add(Wall{{2, 1}, {2, -1}, 0, 1.5});
  scene.add(Wall{{2, -1}, {-2, -1}, 0, 1.5});
  scene.add(Wall{{-2, -1}, {-2, 1}, 0, 1.5});
  scene.add(Wall{{-4, 3}, {4, 3}, 0, 2});

  const RigidTransform left = RigidTransform::from_xyz_ypr({0, 1.1, 1.0}, 0, 0, 0);
  const ScanGeometry fov = ScanGeometry::with_beam_count(0.1, kPi / 360, 337, 0.05, 50.0);
  const PointCloud3 cloud = raycast_cloud(scene, left, fov, {-0.1, 0.0, 0.1}, FrameId("left"));
  TransformTree tree;
  tree.add_static_transform(FrameId("base_link"), FrameId("left"), {0, 1.1, 1.0}, {0, 0, 0});
  tree.add_static_transform(FrameId("base_link"), FrameId("right"), {0, -1.05, 1.0}, {0, 0, 0});

  VirtualizerConfig cfg = config_for({FrameId("right")}, FrameId("base_link"));
  cfg.output_geometry = ScanGeometry::with_beam_count(-kPi, kPi / 360, 720, 0.1, 50.0);
  const auto out = virtualize(cloud, tree, cfg);
  const LaserScan truth = raycast_scan(scene, RigidTransform::from_xyz_ypr({0, -1.05, 1.0}, 0, 0, 0),
                                       cfg.output_geometry, FrameId("right"));
  std::size_t phantom = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (std::isinf(truth.ranges()[i]) && !std::isinf(out[0].scan.ranges()[i])) ++phantom;
  }
  EXPECT_GE(phantom, 1u);
  ScanBinner probe(cfg.output_geometry);
  const auto up = static_cast<std::size_t>(probe.bin_for_bearing(kPi / 2));
  EXPECT_TRUE(std::isinf(truth.ranges()[up]));
  EXPECT_NEAR(out[0].scan.ranges()[up], 4.05, 0.05);
}
