#pragma once

#include <optional>
#include <vector>

#include "hybridnav/geometry.hpp"
#include "hybridnav/kdtree.hpp"

namespace hybridnav {

/// Quintic per-axis polynomial p(t) = c1 + c2 t + c3 t^2 + c4 t^3 + c5 t^4 + c6 t^5
/// over t in [0, T]. c3 stores half the initial acceleration so the position
/// polynomial evaluates literally; acceleration() returns 2*c3 at t = 0.
struct AxisPoly {
  double c[6] = {0, 0, 0, 0, 0, 0};
  double T = 0.0;
};

struct AxisState {
  double position = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
};

/// Boundary-condition quintic solve: c1..c3 from the initial state, c4..c6
/// from the 3x3 system A [c4 c5 c6]' = [dx dv da]' with the deltas taken as
/// residuals after propagating the initial state to T.
AxisPoly solve_min_snap_axis(double x0, double v0, double a0, double xf, double vf,
                             double af, double T);

/// Position, velocity, acceleration at t in [0, T].
AxisState eval_axis(const AxisPoly& poly, double t);

enum class PrimitiveStatus { Free, NearCollision, Colliding };

const char* primitive_status_name(PrimitiveStatus s);

/// Cost weights: near-collision weight is 100x the goal weight and the hard
/// collision weight 100x that again.
struct CostConfig {
  double goal_weight = 1.0;       // c_gw
  double collision_buffer = 0.3;  // meters
  double near_buffer = 0.6;       // meters

  double near_collision_cost() const { return goal_weight * 100.0; }   // c_ncol
  double collision_cost() const { return near_collision_cost() * 100.0; }  // c_col
};

struct Primitive {
  AxisPoly polys[3];  // x, y, z
  Point3 start;
  Point3 endpoint;
  std::vector<std::pair<Point3, double>> samples;  // (position, t)
  double min_obstacle_dist = 0.0;
  PrimitiveStatus status = PrimitiveStatus::Free;
  double cost = 0.0;
  double goal_angle = 0.0;  // a_g, radians in [0, pi]
  std::size_t index = 0;    // stable position in the generated batch
};

/// Endpoints on the sphere of radius `horizon` around the vehicle:
/// `n_azimuth` azimuths spanning `azimuth_fov` centered on the current yaw,
/// replicated per elevation row, plus an optional escape endpoint directly
/// behind the vehicle.
std::vector<Point3> generate_endpoints(const Pose& state, double horizon,
                                       double azimuth_fov, int n_azimuth,
                                       const std::vector<double>& elevation_rows,
                                       bool yaw_escape);

/// Rest-to-rest primitive from `state` to `endpoint` over duration T,
/// discretized so consecutive samples are at most `sample_spacing` apart.
Primitive make_primitive(const Pose& state, const Point3& endpoint, double T,
                         double sample_spacing = 0.1);

struct CollisionCheck {
  double min_dist = 0.0;
  PrimitiveStatus status = PrimitiveStatus::Free;
};

/// Minimum nearest-obstacle distance over the primitive's samples. An empty
/// index means free space (min_dist = +inf).
CollisionCheck check_collision(const Primitive& prim, const KdIndex& index,
                               const CostConfig& cfg);

/// C = C_c + C_g with C_g = a_g * c_gw and the collision term stepped by the
/// two buffers: c_col inside the hard buffer, c_ncol - d_c inside the near
/// buffer, zero beyond.
double primitive_cost(double goal_angle, double min_dist, const CostConfig& cfg);

/// Lowest-cost non-colliding primitive; ties resolved by smaller |goal angle|
/// then lower index. Nothing available (all colliding or empty) -> nullopt.
std::optional<std::size_t> select_best(const std::vector<Primitive>& primitives);

struct BarrierDescentConfig {
  double obstacle_radius = 0.3;  // log-barrier singularity radius per obstacle
  double t_initial = 1.0;
  double t_growth = 4.0;
  double damped_step = 0.5;
};

/// Interior-point descent of a quadratic goal attraction plus log barriers
/// -log(|x - o|^2 - r^2) around each obstacle, with an inner Newton loop per
/// barrier iteration. Returns the iterate trace (goal == start -> empty).
std::vector<Point3> barrier_descent(const std::vector<Point3>& obstacles,
                                    const Point3& start, const Point3& goal,
                                    int barrier_iters, int newton_iters,
                                    const BarrierDescentConfig& cfg = {});

}  // namespace hybridnav
