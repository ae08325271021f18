#include "hybridnav/primitives.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace hybridnav;

namespace {

/// Independent 3x3 solve via Cramer's rule for the boundary system; the
/// implementation goes through a factorization, this does not.
void oracle_c456(double x0, double v0, double a0, double xf, double vf, double af,
                 double T, double out[3]) {
  const double A[3][3] = {{T * T * T, T * T * T * T, T * T * T * T * T},
                          {3 * T * T, 4 * T * T * T, 5 * T * T * T * T},
                          {6 * T, 12 * T * T, 20 * T * T * T}};
  const double B[3] = {xf - (x0 + v0 * T + 0.5 * a0 * T * T), vf - (v0 + a0 * T), af - a0};
  auto det3 = [](const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double d = det3(A);
  for (int col = 0; col < 3; ++col) {
    double M[3][3];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) M[r][c] = c == col ? B[r] : A[r][c];
    }
    out[col] = det3(M) / d;
  }
}

Primitive scored_primitive(PrimitiveStatus status, double cost, double goal_angle,
                           std::size_t index) {
  Primitive p;
  p.status = status;
  p.cost = cost;
  p.goal_angle = goal_angle;
  p.index = index;
  return p;
}

}  // namespace

TEST(MinSnap, RestToRestMatchesClassicalQuintic) {
  const AxisPoly poly = solve_min_snap_axis(0, 0, 0, 1, 0, 0, 1.0);
  const double expect[6] = {0, 0, 0, 10, -15, 6};
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(poly.c[i], expect[i], 1e-9);

  double oracle[3];
  oracle_c456(0, 0, 0, 1, 0, 0, 1.0, oracle);
  EXPECT_NEAR(oracle[0], 10.0, 1e-9);
  EXPECT_NEAR(oracle[1], -15.0, 1e-9);
  EXPECT_NEAR(oracle[2], 6.0, 1e-9);
}

TEST(MinSnap, StationarySolutionIsConstant) {
  const AxisPoly poly = solve_min_snap_axis(2.5, 0, 0, 2.5, 0, 0, 3.0);
  for (int i = 1; i < 6; ++i) EXPECT_NEAR(poly.c[i], 0.0, 1e-9);
  EXPECT_NEAR(poly.c[0], 2.5, 1e-12);
}

TEST(MinSnap, RandomBoundaryConditionsSatisfied) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_real_distribution<double> ut(0.2, 4.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double x0 = u(rng), v0 = u(rng), a0 = u(rng);
    const double xf = u(rng), vf = u(rng), af = u(rng);
    const double T = ut(rng);
    const AxisPoly poly = solve_min_snap_axis(x0, v0, a0, xf, vf, af, T);

    const AxisState s0 = eval_axis(poly, 0.0);
    EXPECT_NEAR(s0.position, x0, 1e-9);
    EXPECT_NEAR(s0.velocity, v0, 1e-9);
    EXPECT_NEAR(s0.acceleration, a0, 1e-9);

    const AxisState sT = eval_axis(poly, T);
    EXPECT_NEAR(sT.position, xf, 1e-8);
    EXPECT_NEAR(sT.velocity, vf, 1e-8);
    EXPECT_NEAR(sT.acceleration, af, 1e-7);

    double oracle[3];
    oracle_c456(x0, v0, a0, xf, vf, af, T, oracle);
    EXPECT_NEAR(poly.c[3], oracle[0], 1e-6 * std::max(1.0, std::abs(oracle[0])));
    EXPECT_NEAR(poly.c[4], oracle[1], 1e-6 * std::max(1.0, std::abs(oracle[1])));
    EXPECT_NEAR(poly.c[5], oracle[2], 1e-6 * std::max(1.0, std::abs(oracle[2])));
  }
}

TEST(MinSnap, RejectsNonPositiveDuration) {
  EXPECT_THROW(solve_min_snap_axis(0, 0, 0, 1, 0, 0, 0.0), std::invalid_argument);
  EXPECT_THROW(solve_min_snap_axis(0, 0, 0, 1, 0, 0, -1.0), std::invalid_argument);
}

TEST(EvalAxis, PolynomialAtZero) {
  AxisPoly poly;
  poly.T = 2.0;
  poly.c[0] = 1.0;
  poly.c[1] = -2.0;
  poly.c[2] = 0.75;
  const AxisState s = eval_axis(poly, 0.0);
  EXPECT_EQ(s.position, 1.0);
  EXPECT_EQ(s.velocity, -2.0);
  EXPECT_EQ(s.acceleration, 1.5);
}

TEST(EvalAxis, RestToRestMidpoint) {
  const AxisPoly poly = solve_min_snap_axis(0, 0, 0, 1, 0, 0, 1.0);
  EXPECT_NEAR(eval_axis(poly, 0.5).position, 0.5, 1e-12);
}

TEST(EvalAxis, FiniteDifferenceConsistency) {
  const AxisPoly poly = solve_min_snap_axis(0.5, -1.0, 2.0, 3.0, 0.5, -1.0, 2.0);
  const double h = 1e-6;
  for (double t : {0.3, 0.9, 1.5}) {
    const double num_v =
        (eval_axis(poly, t + h).position - eval_axis(poly, t - h).position) / (2 * h);
    EXPECT_NEAR(num_v, eval_axis(poly, t).velocity, 1e-6);
    const double num_a =
        (eval_axis(poly, t + h).velocity - eval_axis(poly, t - h).velocity) / (2 * h);
    EXPECT_NEAR(num_a, eval_axis(poly, t).acceleration, 1e-5);
  }
}

TEST(EvalAxis, RejectsOutOfRangeTime) {
  const AxisPoly poly = solve_min_snap_axis(0, 0, 0, 1, 0, 0, 1.0);
  EXPECT_THROW(eval_axis(poly, -0.1), std::invalid_argument);
  EXPECT_THROW(eval_axis(poly, 1.1), std::invalid_argument);
}

TEST(Endpoints, FullCircleSymmetry) {
  Pose state;
  const auto eps = generate_endpoints(state, 2.0, 2 * M_PI, 4, {0.0}, false);
  ASSERT_EQ(eps.size(), 4u);
  for (const Point3& p : eps) EXPECT_NEAR(p.norm(), 2.0, 1e-9);
  // Equally spaced: sum cancels.
  Point3 sum;
  for (const Point3& p : eps) sum = sum + p;
  EXPECT_NEAR(sum.norm(), 0.0, 1e-9);
}

TEST(Endpoints, ElevationRowsMultiply) {
  Pose state;
  const double row = 15.0 * M_PI / 180.0;
  const auto eps = generate_endpoints(state, 1.5, M_PI / 2, 5, {-row, 0.0, row}, false);
  EXPECT_EQ(eps.size(), 15u);
  const auto with_escape = generate_endpoints(state, 1.5, M_PI / 2, 5, {-row, 0.0, row}, true);
  EXPECT_EQ(with_escape.size(), 16u);
}

TEST(Endpoints, AllOnHorizonSphere) {
  Pose state;
  state.position = Point3(3, -2, 1);
  state.yaw = 0.7;
  const auto eps =
      generate_endpoints(state, 1.5, M_PI, 9, {-0.3, 0.0, 0.3}, true);
  for (const Point3& p : eps) {
    EXPECT_NEAR(distance(p, state.position), 1.5, 1e-9);
  }
}

TEST(Endpoints, EscapePointsBackward) {
  Pose state;
  state.yaw = 0.0;
  const auto eps = generate_endpoints(state, 1.0, M_PI / 2, 3, {0.0}, true);
  const Point3& escape = eps.back();
  EXPECT_NEAR(escape.x, -1.0, 1e-9);
  EXPECT_NEAR(escape.y, 0.0, 1e-9);
}

TEST(CheckCollision, BufferClassification) {
  CostConfig cfg;  // collision 0.3, near 0.6
  Pose state;
  Primitive prim = make_primitive(state, Point3(1.5, 0, 0), 1.875);

  {
    KdIndex index(std::vector<Point3>{{0.75, 0.2, 0.0}});  // 0.2 m off the path
    const auto check = check_collision(prim, index, cfg);
    EXPECT_EQ(check.status, PrimitiveStatus::Colliding);
    EXPECT_LE(check.min_dist, 0.3);
  }
  {
    KdIndex empty;
    const auto check = check_collision(prim, empty, cfg);
    EXPECT_EQ(check.status, PrimitiveStatus::Free);
    EXPECT_TRUE(std::isinf(check.min_dist));
  }
  {
    const double mid = (cfg.collision_buffer + cfg.near_buffer) / 2.0;
    KdIndex index(std::vector<Point3>{{0.75, mid, 0.0}});
    const auto check = check_collision(prim, index, cfg);
    EXPECT_EQ(check.status, PrimitiveStatus::NearCollision);
  }
}

TEST(CheckCollision, MinDistMatchesBruteForce) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Point3> obstacles;
  for (int i = 0; i < 40; ++i) obstacles.emplace_back(u(rng), u(rng), u(rng));
  KdIndex index(obstacles);
  CostConfig cfg;

  Pose state;
  const Primitive prim = make_primitive(state, Point3(1.2, 0.9, 0.0), 1.875);
  const auto check = check_collision(prim, index, cfg);

  double brute = std::numeric_limits<double>::infinity();
  for (const auto& [p, t] : prim.samples) {
    for (const Point3& o : obstacles) brute = std::min(brute, distance(p, o));
  }
  EXPECT_NEAR(check.min_dist, brute, 1e-12);
}

TEST(PrimitiveSamples, CoverStartAndEndDensely) {
  Pose state;
  state.position = Point3(1, 1, 0);
  const Primitive prim = make_primitive(state, Point3(2.5, 1, 0), 1.875, 0.1);
  ASSERT_GE(prim.samples.size(), 2u);
  EXPECT_NEAR(prim.samples.front().second, 0.0, 1e-12);
  EXPECT_NEAR(prim.samples.back().second, 1.875, 1e-12);
  EXPECT_NEAR(distance(prim.samples.front().first, state.position), 0.0, 1e-9);
  EXPECT_NEAR(distance(prim.samples.back().first, prim.endpoint), 0.0, 1e-9);
  for (std::size_t i = 1; i < prim.samples.size(); ++i) {
    EXPECT_LE(distance(prim.samples[i - 1].first, prim.samples[i].first), 0.1 + 1e-9);
  }
}

TEST(PrimitiveCost, MatchesFormula) {
  CostConfig cfg;  // c_gw = 1 -> c_ncol = 100, c_col = 10000
  EXPECT_EQ(primitive_cost(0.0, std::numeric_limits<double>::infinity(), cfg), 0.0);
  EXPECT_NEAR(primitive_cost(0.25, 0.1, cfg), 10000.0 + 0.25, 1e-12);
  EXPECT_NEAR(primitive_cost(0.25, 0.5, cfg), 100.0 - 0.5 + 0.25, 1e-12);
}

TEST(PrimitiveCost, StrictOrderingAcrossBands) {
  CostConfig cfg;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ua(0.0, M_PI);
  std::uniform_real_distribution<double> ufree(cfg.near_buffer + 1e-6, 10.0);
  std::uniform_real_distribution<double> unear(cfg.collision_buffer + 1e-6,
                                               cfg.near_buffer);
  std::uniform_real_distribution<double> ucol(0.0, cfg.collision_buffer);
  for (int i = 0; i < 2000; ++i) {
    const double free_cost = primitive_cost(ua(rng), ufree(rng), cfg);
    const double near_cost = primitive_cost(ua(rng), unear(rng), cfg);
    const double col_cost = primitive_cost(ua(rng), ucol(rng), cfg);
    EXPECT_LT(free_cost, near_cost);
    EXPECT_LT(near_cost, col_cost);
  }
}

TEST(SelectBest, FreeBeatsColliding) {
  CostConfig cfg;
  std::vector<Primitive> prims;
  prims.push_back(scored_primitive(PrimitiveStatus::Colliding,
                                   primitive_cost(0.1, 0.1, cfg), 0.1, 0));
  prims.push_back(scored_primitive(PrimitiveStatus::Free, primitive_cost(0.4, 5.0, cfg),
                                   0.4, 1));
  const auto best = select_best(prims);
  ASSERT_TRUE(best.has_value());
  EXPECT_EQ(*best, 1u);
}

TEST(SelectBest, AllCollidingIsStuck) {
  CostConfig cfg;
  std::vector<Primitive> prims;
  for (int i = 0; i < 5; ++i) {
    prims.push_back(scored_primitive(PrimitiveStatus::Colliding,
                                     primitive_cost(0.1 * i, 0.05, cfg), 0.1 * i, i));
  }
  EXPECT_FALSE(select_best(prims).has_value());
  EXPECT_FALSE(select_best({}).has_value());
}

TEST(SelectBest, TieBreaksOnGoalAngleThenIndex) {
  std::vector<Primitive> prims;
  prims.push_back(scored_primitive(PrimitiveStatus::Free, 1.0, 0.8, 0));
  prims.push_back(scored_primitive(PrimitiveStatus::Free, 1.0, 0.2, 1));
  prims.push_back(scored_primitive(PrimitiveStatus::Free, 1.0, 0.2, 2));
  const auto best = select_best(prims);
  ASSERT_TRUE(best.has_value());
  EXPECT_EQ(*best, 1u);
}

TEST(SelectBest, PermutationInvariantUpToTieBreak) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> uc(0.0, 50.0);
  std::vector<Primitive> prims;
  for (int i = 0; i < 12; ++i) {
    prims.push_back(scored_primitive(PrimitiveStatus::Free, uc(rng), uc(rng) / 50.0, i));
  }
  const auto base = select_best(prims);
  ASSERT_TRUE(base.has_value());
  const Primitive chosen = prims[*base];

  std::vector<Primitive> shuffled = prims;
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto best = select_best(shuffled);
    ASSERT_TRUE(best.has_value());
    EXPECT_EQ(shuffled[*best].cost, chosen.cost);
    EXPECT_EQ(shuffled[*best].goal_angle, chosen.goal_angle);
  }
}

TEST(BarrierDescent, NoObstaclesConvergesStraight) {
  const Point3 start(0, 0, 0), goal(2, 1, 0);
  const auto trace = barrier_descent({}, start, goal, 3, 5);
  ASSERT_FALSE(trace.empty());
  EXPECT_NEAR(distance(trace.back(), goal), 0.0, 1e-6);
  // Straight line: every iterate is collinear with start->goal.
  const Eigen::Vector3d dir = (goal - start).vec().normalized();
  for (const Point3& p : trace) {
    const Eigen::Vector3d d = (p - start).vec();
    EXPECT_NEAR((d - d.dot(dir) * dir).norm(), 0.0, 1e-9);
  }
}

TEST(BarrierDescent, ClearsObstacleBetweenStartAndGoal) {
  BarrierDescentConfig cfg;
  const Point3 start(0, 0.05, 0), goal(4, 0, 0);
  const std::vector<Point3> obstacles = {{2, 0, 0}};
  const auto trace = barrier_descent(obstacles, start, goal, 8, 10, cfg);
  ASSERT_FALSE(trace.empty());
  double min_clearance = std::numeric_limits<double>::infinity();
  for (const Point3& p : trace) {
    min_clearance = std::min(min_clearance, distance(p, obstacles[0]) - cfg.obstacle_radius);
  }
  EXPECT_GT(min_clearance, 0.0);
  EXPECT_LT(distance(trace.back(), goal), 0.3);
}

TEST(BarrierDescent, GoalEqualsStartIsEmpty) {
  const Point3 p(1, 2, 3);
  EXPECT_TRUE(barrier_descent({}, p, p, 5, 5).empty());
}
