#include "hybridnav/kdtree.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace hybridnav;

namespace {

/// Brute-force reference: full scan sorted by (distance, insertion order).
std::vector<std::pair<double, std::size_t>> linear_knn(const std::vector<Point3>& pts,
                                                       const Point3& query, int k) {
  std::vector<std::pair<double, std::size_t>> all;
  all.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) all.emplace_back(distance(pts[i], query), i);
  std::sort(all.begin(), all.end());
  if (static_cast<int>(all.size()) > k) all.resize(k);
  return all;
}

}  // namespace

TEST(KdIndex, SimpleNearest) {
  const std::vector<Point3> pts = {{1, 0, 0}, {2, 0, 0}};
  KdIndex index(pts);
  const auto nn = index.knn(Point3(), 1);
  ASSERT_EQ(nn.size(), 1u);
  EXPECT_NEAR(nn[0].distance, 1.0, 1e-12);
  EXPECT_EQ(nn[0].index, 0u);
}

TEST(KdIndex, KLargerThanCloudReturnsAllSorted) {
  const std::vector<Point3> pts = {{3, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  KdIndex index(pts);
  const auto nn = index.knn(Point3(), 10);
  ASSERT_EQ(nn.size(), 3u);
  EXPECT_NEAR(nn[0].distance, 1.0, 1e-12);
  EXPECT_NEAR(nn[1].distance, 2.0, 1e-12);
  EXPECT_NEAR(nn[2].distance, 3.0, 1e-12);
}

TEST(KdIndex, EmptyIndexSignalsEmpty) {
  KdIndex index;
  EXPECT_TRUE(index.empty());
  EXPECT_TRUE(index.knn(Point3(), 3).empty());
  EXPECT_TRUE(std::isinf(index.nearest_distance(Point3())));
}

TEST(KdIndex, MatchesLinearScanOracle) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<Point3> pts;
  for (int i = 0; i < 500; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  KdIndex index(pts);

  for (int q = 0; q < 100; ++q) {
    const Point3 query(u(rng), u(rng), u(rng));
    for (int k : {1, 3, 8}) {
      const auto got = index.knn(query, k);
      const auto want = linear_knn(pts, query, k);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].index, want[i].second);
        EXPECT_NEAR(got[i].distance, want[i].first, 1e-12);
      }
    }
  }
}

TEST(KdIndex, TiesBrokenByInsertionOrder) {
  const std::vector<Point3> pts = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}};
  KdIndex index(pts);
  const auto nn = index.knn(Point3(), 2);
  ASSERT_EQ(nn.size(), 2u);
  EXPECT_EQ(nn[0].index, 0u);
  EXPECT_EQ(nn[1].index, 1u);
}

TEST(KdIndex, NearestDistanceAgreesWithKnn) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<Point3> pts;
  for (int i = 0; i < 200; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  KdIndex index(pts);
  for (int q = 0; q < 50; ++q) {
    const Point3 query(u(rng), u(rng), u(rng));
    EXPECT_NEAR(index.nearest_distance(query), index.knn(query, 1)[0].distance, 1e-12);
  }
}

TEST(KdIndex, RadiusSearchMatchesPredicate) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<Point3> pts;
  for (int i = 0; i < 300; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  KdIndex index(pts);
  const Point3 query(0.5, -0.5, 0.0);
  const double radius = 2.5;
  const auto found = index.radius_search(query, radius);
  std::size_t expected = 0;
  for (const Point3& p : pts) {
    if (distance(p, query) <= radius) ++expected;
  }
  EXPECT_EQ(found.size(), expected);
  for (const auto& nb : found) EXPECT_LE(nb.distance, radius);
}
