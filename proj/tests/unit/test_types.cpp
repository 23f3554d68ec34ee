#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "laser_tools/types.hpp"
#include "oracle.hpp"

using namespace laser_tools;

namespace {

constexpr double kPi = std::numbers::pi;

LaserScan make_scan(double angle_min, double inc, std::size_t beams) {
  return LaserScan(FrameId("laser"), ScanGeometry::with_beam_count(angle_min, inc, beams, 0.0, 10.0),
                   std::vector<double>(beams, 1.0));
}

void expect_vec_near(const Vec3& a, const Vec3& b, double tol) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

void expect_same_motion(const RigidTransform& a, const RigidTransform& b, double tol) {
  EXPECT_LT((oracle::to_matrix(a) - oracle::to_matrix(b)).cwiseAbs().maxCoeff(), tol)
      << oracle::to_matrix(a) << "\nvs\n"
      << oracle::to_matrix(b);
}

}  // namespace

TEST(BeamAngle, Examples) {
  const LaserScan half = make_scan(-kPi / 2, kPi / 180, 181);
  EXPECT_DOUBLE_EQ(beam_angle(half, 0), -kPi / 2);
  EXPECT_NEAR(beam_angle(half, 90), 0.0, 1e-15);
  const LaserScan quarter = make_scan(0.0, 0.25, 5);
  EXPECT_DOUBLE_EQ(beam_angle(quarter, 3), 0.75);
}

TEST(BeamAngle, OutOfRange) {
  const LaserScan s = make_scan(0.0, 0.25, 5);
  EXPECT_THROW(beam_angle(s, 5), std::out_of_range);
}

TEST(Compose, IdentityIsNeutral) {
  const RigidTransform t = RigidTransform::from_xyz_ypr({1, -2, 3}, 0.4, -0.2, 1.1);
  EXPECT_EQ(compose(RigidTransform::identity(), t), t);
  expect_same_motion(compose(t, RigidTransform::identity()), t, 1e-15);
}

TEST(Compose, WithInverseIsIdentity) {
  const RigidTransform t = RigidTransform::from_xyz_ypr({1, -2, 3}, 0.4, -0.2, 1.1);
  expect_same_motion(compose(t, invert(t)), RigidTransform::identity(), 1e-9);
  expect_same_motion(compose(invert(t), t), RigidTransform::identity(), 1e-9);
}

TEST(Compose, Translations) {
  const RigidTransform t = compose(RigidTransform::from_translation(1, 0, 0), RigidTransform::from_translation(0, 2, 0));
  expect_vec_near(t.translation(), {1, 2, 0}, 1e-15);
  EXPECT_EQ(t.rotation(), Quaternion::identity());
}

TEST(Invert, Examples) {
  EXPECT_EQ(invert(RigidTransform::identity()), RigidTransform::identity());
  const RigidTransform inv = invert(RigidTransform::from_translation(1, 2, 3));
  expect_vec_near(inv.translation(), {-1, -2, -3}, 0.0);
  // Rotation-matrix transpose: R_z(0.3)^T == R_z(-0.3).
  const RigidTransform yaw = RigidTransform::from_xyz_ypr({}, 0.3, 0, 0);
  const oracle::Mat4 expected = oracle::homogeneous(oracle::Vec::Zero(), 0.3, 0, 0).transpose();
  EXPECT_LT((oracle::to_matrix(invert(yaw)) - expected).cwiseAbs().maxCoeff(), 1e-15);
  expect_same_motion(invert(yaw), RigidTransform::from_xyz_ypr({}, -0.3, 0, 0), 1e-15);
}

TEST(Apply, Examples) {
  EXPECT_EQ(apply(RigidTransform::identity(), {1, 2, 3}), (Vec3{1, 2, 3}));
  EXPECT_EQ(apply(RigidTransform::from_translation(0, 0, 5), {1, 1, 0}), (Vec3{1, 1, 5}));
  // Right-handed rotation about +y tips +x downward.
  const Vec3 p = apply(RigidTransform::from_xyz_ypr({}, 0, 0.3, 0), {1, 0, 0});
  expect_vec_near(p, {std::cos(0.3), 0.0, -std::sin(0.3)}, 1e-15);
}

TEST(Apply, RejectsNonFinite) {
  const auto t = RigidTransform::identity();
  EXPECT_THROW(apply(t, {std::nan(""), 0, 0}), std::invalid_argument);
  EXPECT_THROW(apply(t, {0, INFINITY, 0}), std::invalid_argument);
}

TEST(EulerConvention, MatchesIntrinsicZYXMatrices) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const oracle::Pose pose = oracle::random_pose(rng);
    EXPECT_LT((oracle::to_matrix(pose.transform()) - pose.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(RigidTransformProperties, NormDriftOverLongChains) {
  std::mt19937_64 rng(11);
  RigidTransform acc;
  for (int k = 0; k < 1000; ++k) {
    acc = compose(oracle::random_pose(rng, 0.1).transform(), acc);
    ASSERT_LT(std::abs(acc.rotation().norm() - 1.0), 1e-9);
  }
}

TEST(RigidTransformProperties, AssociativeAndIsometric) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 500; ++i) {
    const auto a = oracle::random_pose(rng).transform();
    const auto b = oracle::random_pose(rng).transform();
    const auto c = oracle::random_pose(rng).transform();
    expect_same_motion(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-9);

    const Vec3 p{u(rng), u(rng), u(rng)}, q{u(rng), u(rng), u(rng)};
    EXPECT_NEAR(norm(apply(a, p) - apply(a, q)), norm(p - q), 1e-9);
    expect_vec_near(apply(invert(a), apply(a, p)), p, 1e-9);
  }
}

TEST(RigidTransform, RejectsDegenerateRotation) {
  EXPECT_THROW(RigidTransform({0, 0, 0}, Quaternion{0, 0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(RigidTransform({NAN, 0, 0}, Quaternion{}), std::invalid_argument);
  const RigidTransform t({0, 0, 0}, Quaternion{2, 0, 0, 0});
  EXPECT_DOUBLE_EQ(t.rotation().norm(), 1.0);
}

TEST(FrameIdTest, Validation) {
  EXPECT_NO_THROW(FrameId("laser_frame"));
  EXPECT_THROW(FrameId(""), std::invalid_argument);
  EXPECT_THROW(FrameId("laser frame"), std::invalid_argument);
  EXPECT_THROW(FrameId("scan\t1"), std::invalid_argument);
  EXPECT_NE(FrameId("a"), FrameId("A"));
}

TEST(LaserScanTest, LengthFormulaOnRandomGeometries) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> amin(-kPi, 0.0);
  std::uniform_real_distribution<double> span(0.0, kPi);
  std::uniform_real_distribution<double> inc(1e-3, 0.5);
  for (int i = 0; i < 1000; ++i) {
    const ScanGeometry g{amin(rng), 0.0, inc(rng), 0.0, 5.0};
    ScanGeometry h = g;
    h.angle_max = g.angle_min + span(rng);
    const auto n = static_cast<std::size_t>(std::floor((h.angle_max - h.angle_min) / h.angle_increment)) + 1;
    ASSERT_EQ(h.beam_count(), n);
    EXPECT_NO_THROW(LaserScan(FrameId("f"), h, std::vector<double>(n, 1.0)));
    EXPECT_THROW(LaserScan(FrameId("f"), h, std::vector<double>(n + 1, 1.0)), std::invalid_argument);
  }
}

TEST(LaserScanTest, WithBeamCountSurvivesFloorRounding) {
  for (std::size_t n : {2u, 181u, 360u, 720u, 1081u, 1440u}) {
    for (double inc : {kPi / 180, kPi / 360, kPi / 720, 0.1, 0.0043633231299858239}) {
      if (static_cast<double>(n - 1) * inc > 2 * kPi) continue;
      EXPECT_EQ(ScanGeometry::with_beam_count(-kPi / 2, inc, n, 0.0, 1.0).beam_count(), n);
    }
  }
}

TEST(LaserScanTest, WithBeamCountOnRandomGeometries) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> amin(-kPi, kPi), inc(1e-4, 0.2), unit(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const double a0 = amin(rng), da = inc(rng);
    const double room = std::min(2 * kPi, kPi - a0 + kPi);
    const auto max_beams = static_cast<std::size_t>(room / da);
    if (max_beams < 2) continue;
    const std::size_t n = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(max_beams - 1));
    ASSERT_EQ(ScanGeometry::with_beam_count(a0, da, n, 0.0, 1.0).beam_count(), n) << a0 << " " << da << " " << n;
  }
  // angle_max lands next to zero, where its own ulp is far finer than the span's rounding error.
  EXPECT_EQ(ScanGeometry::with_beam_count(-3.0, 0.1, 31, 0.0, 1.0).beam_count(), 31u);
}

TEST(LaserScanTest, SentinelsAndBounds) {
  const ScanGeometry g = ScanGeometry::with_beam_count(0.0, 0.5, 4, 0.5, 5.0);
  const LaserScan s(FrameId("f"), g, {0.1, 1.0, 6.0, -INFINITY});
  EXPECT_TRUE(std::isinf(s.ranges()[0]));
  EXPECT_EQ(s.ranges()[1], 1.0);
  EXPECT_TRUE(std::isinf(s.ranges()[2]));
  EXPECT_GT(s.ranges()[3], 0.0);
  EXPECT_THROW(LaserScan(FrameId("f"), g, {1.0, NAN, 1.0, 1.0}), std::invalid_argument);
}

TEST(ScanGeometryTest, Validation) {
  EXPECT_THROW((ScanGeometry{0, 1, 0, 0, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((ScanGeometry{1, 0, 0.1, 0, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((ScanGeometry{0, 1, 0.1, 1, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((ScanGeometry{0, 1, 0.1, -1, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((ScanGeometry{-4, 4, 0.1, 0, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((ScanGeometry{0, 1, 1e-12, 0, 1}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((ScanGeometry{0, 0, 0.1, 0, 1}.validate()));
}

TEST(PointCloudTest, RejectsNonFinitePoints) {
  try {
    PointCloud3(FrameId("f"), {{0, 0, 0}, {1, NAN, 0}});
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("index 1"), std::string::npos);
  }
}
