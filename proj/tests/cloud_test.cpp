#include "hybridnav/cloud.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace hybridnav;

namespace {

PointCloud make_cloud(std::vector<Point3> pts, Frame frame = Frame::Sensor) {
  PointCloud c;
  c.points = std::move(pts);
  c.frame = frame;
  return c;
}

/// Uniform random points on a wall patch, seeded.
PointCloud synthetic_wall(std::size_t n, double width, double height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, width), uz(0.0, height);
  PointCloud c;
  c.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.points.emplace_back(ux(rng), 2.0, uz(rng));
  }
  return c;
}

}  // namespace

TEST(VoxelDownsample, CoincidentPointsCollapseToOne) {
  PointCloud c;
  for (int i = 0; i < 10; ++i) c.points.emplace_back(1.02, 2.03, 0.74);
  const PointCloud out = voxel_downsample(c, 0.1, 5);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_NEAR(out.points[0].x, 1.02, 1e-12);
  EXPECT_NEAR(out.points[0].y, 2.03, 1e-12);
  EXPECT_NEAR(out.points[0].z, 0.74, 1e-12);
}

TEST(VoxelDownsample, IsolatedPointBelowMinPointsIsNoise) {
  const PointCloud out = voxel_downsample(make_cloud({{1, 1, 1}}), 0.1, 2);
  EXPECT_TRUE(out.empty());
}

TEST(VoxelDownsample, HitsDownsampleTargetOnDenseWall) {
  const PointCloud wall = synthetic_wall(100000, 10.0, 3.0, 7);
  const PointCloud out = voxel_downsample(wall, 0.12, 1);
  EXPECT_GE(out.size(), 1500u);
  EXPECT_LE(out.size(), 2500u);
}

TEST(VoxelDownsample, DropsNonFiniteAndOriginPoints) {
  PointCloud c = make_cloud({{0, 0, 0},
                             {std::nan(""), 1, 1},
                             {1, std::numeric_limits<double>::infinity(), 0},
                             {0.5, 0.5, 0.5}});
  const PointCloud out = voxel_downsample(c, 0.2, 1);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_NEAR(out.points[0].x, 0.5, 1e-12);
}

TEST(VoxelDownsample, OutputNeverLargerAndInsideOccupiedVoxels) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  PointCloud c;
  for (int i = 0; i < 500; ++i) c.points.emplace_back(u(rng), u(rng), u(rng));
  const double voxel = 0.5;
  const PointCloud out = voxel_downsample(c, voxel, 1);
  EXPECT_LE(out.size(), c.size());
  for (const Point3& q : out.points) {
    bool inside_occupied = false;
    for (const Point3& p : c.points) {
      if (std::floor(p.x / voxel) == std::floor(q.x / voxel) &&
          std::floor(p.y / voxel) == std::floor(q.y / voxel) &&
          std::floor(p.z / voxel) == std::floor(q.z / voxel)) {
        inside_occupied = true;
        break;
      }
    }
    EXPECT_TRUE(inside_occupied);
  }
}

TEST(TransformCloud, IdentityPoseLeavesPointsUnchanged) {
  const PointCloud c = make_cloud({{1, 2, 3}, {-4, 0, 2}});
  const PointCloud out = transform_cloud(c, Pose{}, Frame::Body);
  EXPECT_EQ(out.frame, Frame::Body);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR(distance(out.points[i], c.points[i]), 0.0, 1e-12);
  }
}

TEST(TransformCloud, PureYawRotatesAxes) {
  Pose pose;
  pose.yaw = M_PI / 2.0;
  const PointCloud out = transform_cloud(make_cloud({{1, 0, 0}}), pose, Frame::Body);
  EXPECT_NEAR(out.points[0].x, 0.0, 1e-12);
  EXPECT_NEAR(out.points[0].y, 1.0, 1e-12);
  EXPECT_NEAR(out.points[0].z, 0.0, 1e-12);
}

TEST(TransformCloud, RandomPoseRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-1.2, 1.2);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    Pose pose;
    pose.roll = angle(rng);
    pose.pitch = angle(rng);
    pose.yaw = angle(rng);
    pose.position = Point3(coord(rng), coord(rng), coord(rng));

    PointCloud c;
    for (int i = 0; i < 20; ++i) c.points.emplace_back(coord(rng), coord(rng), coord(rng));

    const PointCloud fwd = transform_cloud(c, pose, Frame::Body);
    const PointCloud back = transform_cloud(fwd, inverse(pose), Frame::Sensor);
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_NEAR(distance(back.points[i], c.points[i]), 0.0, 1e-9);
    }
  }
}

TEST(TransformCloud, PreservesPairwiseDistances) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  PointCloud c;
  for (int i = 0; i < 30; ++i) c.points.emplace_back(coord(rng), coord(rng), coord(rng));
  Pose pose;
  pose.roll = 0.3;
  pose.pitch = -0.7;
  pose.yaw = 2.1;
  pose.position = Point3(5, -2, 1);
  const PointCloud out = transform_cloud(c, pose, Frame::Odometry);
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      EXPECT_NEAR(distance(out.points[i], out.points[j]),
                  distance(c.points[i], c.points[j]), 1e-9);
    }
  }
}

TEST(TransformCloud, RejectsSameFrame) {
  const PointCloud c = make_cloud({{1, 0, 0}});
  EXPECT_THROW(transform_cloud(c, Pose{}, Frame::Sensor), std::invalid_argument);
}

TEST(CropBox, RemovesInsideAndBoundaryPoints) {
  const PointCloud c = make_cloud({{0.5, 0.5, 0.5}, {1.0, 1.0, 1.0}, {2, 2, 2}},
                                  Frame::Body);
  const PointCloud out = crop_box_remove(c, Point3(0, 0, 0), Point3(1, 1, 1));
  ASSERT_EQ(out.size(), 1u);  // boundary point removed: the box is closed
  EXPECT_NEAR(out.points[0].x, 2.0, 1e-12);
}

TEST(CropBox, DegenerateBoxIsNoOp) {
  const PointCloud c = make_cloud({{0, 0, 0}, {1, 1, 1}}, Frame::Body);
  const PointCloud out = crop_box_remove(c, Point3(0, 0, 0), Point3(0, 0, 0));
  EXPECT_EQ(out.size(), c.size());
}

TEST(CloudStatus, Classification) {
  EXPECT_EQ(classify_cloud_status(0, 0), CloudStatus::EmptyOk);
  EXPECT_EQ(classify_cloud_status(5000, 0), CloudStatus::Noisy);
  EXPECT_EQ(classify_cloud_status(5000, 1200), CloudStatus::Usable);
}

TEST(RadiusRemove, MinimumDepthBehaviour) {
  const PointCloud c = make_cloud({{0.4, 0, 0}, {0.6, 0, 0}});
  const PointCloud out = radius_remove(c, Point3(), 0.5);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_NEAR(out.points[0].x, 0.6, 1e-12);
}

TEST(RadiusRemove, ZeroRadiusRemovesOnlyCenter) {
  const PointCloud c = make_cloud({{0, 0, 0}, {0.01, 0, 0}});
  const PointCloud out = radius_remove(c, Point3(), 0.0);
  ASSERT_EQ(out.size(), 1u);
}

TEST(RadiusRemove, EpsilonRingSplit) {
  PointCloud c;
  const double eps = 1e-3;
  int inner = 0;
  for (int i = 0; i < 60; ++i) {
    const double a = 2 * M_PI * i / 60;
    const double r = (i % 2 == 0) ? 0.5 - eps : 0.5 + eps;
    if (i % 2 == 0) ++inner;
    c.points.emplace_back(r * std::cos(a), r * std::sin(a), 0.0);
  }
  const PointCloud out = radius_remove(c, Point3(), 0.5);
  EXPECT_EQ(out.size(), c.size() - inner);
}

TEST(Passthrough, FloorRemovedAndPredicateOracle) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  PointCloud c;
  for (int i = 0; i < 300; ++i) c.points.emplace_back(u(rng), u(rng), u(rng));

  const double z_min = 0.2, z_max = 1.5;
  const PointCloud out = passthrough_filter(c, z_min, z_max, YSign::Pos);
  std::size_t expected = 0;
  for (const Point3& p : c.points) {
    if (p.z >= z_min && p.z <= z_max && p.y > 0) ++expected;
  }
  EXPECT_EQ(out.size(), expected);
  for (const Point3& p : out.points) {
    EXPECT_GE(p.z, z_min);
    EXPECT_LE(p.z, z_max);
    EXPECT_GT(p.y, 0.0);
  }
}

TEST(Passthrough, AnySignKeepsBothSides) {
  const PointCloud c = make_cloud({{0, -1, 0.5}, {0, 1, 0.5}, {0, 1, 3.0}});
  const PointCloud out = passthrough_filter(c, 0.0, 1.0, YSign::Any);
  EXPECT_EQ(out.size(), 2u);
}

TEST(DustFilter, ConstantRangeRingSurvives) {
  PointCloud c;
  for (int i = 0; i < 100; ++i) {
    const double a = 2 * M_PI * i / 100;
    Point3 p(2.0 * std::cos(a), 2.0 * std::sin(a), 0.0);
    p.ring = 3;
    c.points.push_back(p);
  }
  const auto result = dust_filter(c, 5, 0.05);
  EXPECT_FALSE(result.rings_missing);
  EXPECT_EQ(result.cloud.size(), c.size());
}

TEST(DustFilter, HighVarianceSegmentRemoved) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> noise(0.0, 0.5);
  PointCloud c;
  int dusty = 0;
  for (int i = 0; i < 200; ++i) {
    const double a = M_PI * i / 200;  // half ring
    double r = 3.0;
    const bool in_dust = i >= 60 && i < 140;
    if (in_dust) {
      r += noise(rng);
      ++dusty;
    }
    Point3 p(r * std::cos(a), r * std::sin(a), 0.0);
    p.ring = 0;
    c.points.push_back(p);
  }
  const auto result = dust_filter(c, 5, 0.05);
  int removed_dusty = 0;
  // Count surviving dusty points by tag: dust lies at azimuth in the removed band.
  std::size_t survivors = result.cloud.size();
  removed_dusty = static_cast<int>(c.size() - survivors);
  EXPECT_GT(removed_dusty, static_cast<int>(0.95 * dusty));

  // No low-variance point may be removed: the clean ring head must survive.
  int clean_head = 0;
  for (const Point3& p : result.cloud.points) {
    const double a = std::atan2(p.y, p.x);
    if (a < M_PI * 50 / 200) ++clean_head;
  }
  EXPECT_GE(clean_head, 45);
}

TEST(DustFilter, EmptyCloudAndMissingRings) {
  EXPECT_TRUE(dust_filter(PointCloud{}, 5, 0.05).cloud.empty());
  const auto result = dust_filter(make_cloud({{1, 0, 0}, {2, 0, 0}, {3, 0, 0}}), 5, 0.05);
  EXPECT_TRUE(result.rings_missing);
  EXPECT_EQ(result.cloud.size(), 3u);
}

TEST(FitPlane, ExactHorizontalPlane) {
  PointCloud c;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) c.points.emplace_back(i * 0.1, j * 0.1, 0.0);
  }
  const auto plane = fit_plane(c, 0.05, 200, 1);
  ASSERT_TRUE(plane.has_value());
  EXPECT_NEAR(std::abs(plane->c), 1.0, 1e-9);
  EXPECT_NEAR(plane->d, 0.0, 1e-9);
}

TEST(FitPlane, DiagonalPlaneNormal) {
  PointCloud c;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double x = i * 0.1, y = j * 0.1;
      c.points.emplace_back(x, y, x);  // z = x
    }
  }
  const auto plane = fit_plane(c, 0.05, 200, 1);
  ASSERT_TRUE(plane.has_value());
  // Normal proportional to (1, 0, -1)/sqrt(2) up to sign.
  EXPECT_NEAR(std::abs(plane->a), M_SQRT1_2, 1e-6);
  EXPECT_NEAR(plane->b, 0.0, 1e-6);
  EXPECT_NEAR(std::abs(plane->c), M_SQRT1_2, 1e-6);
  EXPECT_LT(plane->a * plane->c, 0.0);
}

TEST(FitPlane, RecoversInliersUnderOutliers) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> far(1.0, 5.0);
  PointCloud c;
  const int n_in = 400, n_out = 100;
  for (int i = 0; i < n_in; ++i) c.points.emplace_back(u(rng), u(rng), 0.0);
  for (int i = 0; i < n_out; ++i) c.points.emplace_back(u(rng), u(rng), far(rng));
  const auto plane = fit_plane(c, 0.02, 400, 17);
  ASSERT_TRUE(plane.has_value());
  int recovered = 0;
  for (int i = 0; i < n_in; ++i) {
    if (std::abs(plane->signed_distance(c.points[i])) <= 0.02) ++recovered;
  }
  EXPECT_GE(recovered, static_cast<int>(0.95 * n_in));
}

TEST(FitPlane, DegenerateInputsRejected) {
  EXPECT_FALSE(fit_plane(make_cloud({{0, 0, 0}, {1, 0, 0}}), 0.05, 100, 1).has_value());
  PointCloud collinear;
  for (int i = 0; i < 10; ++i) collinear.points.emplace_back(i * 0.1, 0.0, 0.0);
  EXPECT_FALSE(fit_plane(collinear, 0.05, 100, 1).has_value());
}

TEST(FitPlane, DeterministicForFixedSeed) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PointCloud c;
  for (int i = 0; i < 200; ++i) c.points.emplace_back(u(rng), u(rng), 0.05 * u(rng));
  const auto p1 = fit_plane(c, 0.03, 100, 99);
  const auto p2 = fit_plane(c, 0.03, 100, 99);
  ASSERT_TRUE(p1 && p2);
  EXPECT_EQ(p1->a, p2->a);
  EXPECT_EQ(p1->b, p2->b);
  EXPECT_EQ(p1->c, p2->c);
  EXPECT_EQ(p1->d, p2->d);
}

TEST(FitPlane, MatchesLeastSquaresOnCleanData) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PointCloud c;
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng), y = u(rng);
    c.points.emplace_back(x, y, 0.3 * x - 0.2 * y + 1.0);
  }
  const auto ls = fit_plane_least_squares(c.points);
  const auto ransac = fit_plane(c, 1e-6, 300, 5);
  ASSERT_TRUE(ls && ransac);
  const double cosang = std::abs(ls->normal().dot(ransac->normal()));
  EXPECT_GT(cosang, std::cos(1e-6));
}

TEST(CloudIo, RoundTrip) {
  PointCloud c = make_cloud({{1.5, -2.25, 0.125}, {0.5, 0.5, 0.5}}, Frame::Odometry);
  c.points[0].intensity = 0.75;
  c.points[0].ring = 7;
  std::stringstream ss;
  write_cloud(ss, c);
  const auto back = read_cloud(ss);
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(back->frame, Frame::Odometry);
  ASSERT_EQ(back->size(), 2u);
  EXPECT_EQ(back->points[0].ring, 7);
  EXPECT_NEAR(back->points[0].intensity, 0.75, 1e-12);
  EXPECT_NEAR(distance(back->points[0], c.points[0]), 0.0, 1e-12);
}

TEST(CloudIo, BadHeaderReported) {
  std::stringstream ss("cloudv2 1 sensor\n0 0 0\n");
  std::string err;
  EXPECT_FALSE(read_cloud(ss, &err).has_value());
  EXPECT_NE(err.find("header"), std::string::npos);
}
