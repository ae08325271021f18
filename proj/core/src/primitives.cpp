#include "hybridnav/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hybridnav {

AxisPoly solve_min_snap_axis(double x0, double v0, double a0, double xf, double vf,
                             double af, double T) {
  if (T <= 0.0) throw std::invalid_argument("solve_min_snap_axis: T must be > 0");

  AxisPoly poly;
  poly.T = T;
  poly.c[0] = x0;
  poly.c[1] = v0;
  poly.c[2] = a0 / 2.0;

  Eigen::Matrix3d A;
  A << T * T * T, T * T * T * T, T * T * T * T * T,
       3 * T * T, 4 * T * T * T, 5 * T * T * T * T,
       6 * T, 12 * T * T, 20 * T * T * T;
  Eigen::Vector3d B;
  B << xf - (x0 + v0 * T + 0.5 * a0 * T * T),
       vf - (v0 + a0 * T),
       af - a0;
  const Eigen::Vector3d c456 = A.partialPivLu().solve(B);
  poly.c[3] = c456(0);
  poly.c[4] = c456(1);
  poly.c[5] = c456(2);
  return poly;
}

AxisState eval_axis(const AxisPoly& poly, double t) {
  if (t < 0.0 || t > poly.T) {
    throw std::invalid_argument("eval_axis: t outside [0, T]");
  }
  const double* c = poly.c;
  AxisState s;
  s.position = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
  s.velocity = c[1] + t * (2 * c[2] + t * (3 * c[3] + t * (4 * c[4] + t * 5 * c[5])));
  s.acceleration = 2 * c[2] + t * (6 * c[3] + t * (12 * c[4] + t * 20 * c[5]));
  return s;
}

const char* primitive_status_name(PrimitiveStatus s) {
  switch (s) {
    case PrimitiveStatus::Free: return "free";
    case PrimitiveStatus::NearCollision: return "near";
    case PrimitiveStatus::Colliding: return "colliding";
  }
  return "unknown";
}

std::vector<Point3> generate_endpoints(const Pose& state, double horizon,
                                       double azimuth_fov, int n_azimuth,
                                       const std::vector<double>& elevation_rows,
                                       bool yaw_escape) {
  if (n_azimuth < 1) throw std::invalid_argument("generate_endpoints: n_azimuth >= 1");
  if (horizon <= 0.0) throw std::invalid_argument("generate_endpoints: horizon > 0");

  std::vector<double> azimuths;
  azimuths.reserve(n_azimuth);
  const bool full_circle = azimuth_fov >= 2.0 * M_PI - 1e-9;
  if (full_circle) {
    // Periodic spacing: no duplicate at the wrap seam, straight ahead included.
    for (int i = 0; i < n_azimuth; ++i) {
      azimuths.push_back(state.yaw + i * (2.0 * M_PI / n_azimuth));
    }
  } else if (n_azimuth == 1) {
    azimuths.push_back(state.yaw);
  } else {
    for (int i = 0; i < n_azimuth; ++i) {
      const double frac = static_cast<double>(i) / (n_azimuth - 1);
      azimuths.push_back(state.yaw - azimuth_fov / 2.0 + frac * azimuth_fov);
    }
  }

  std::vector<double> rows = elevation_rows;
  if (rows.empty()) rows.push_back(0.0);

  std::vector<Point3> endpoints;
  endpoints.reserve(azimuths.size() * rows.size() + 1);
  const Point3& p = state.position;
  for (double elev : rows) {
    for (double az : azimuths) {
      endpoints.emplace_back(p.x + horizon * std::cos(elev) * std::cos(az),
                             p.y + horizon * std::cos(elev) * std::sin(az),
                             p.z + horizon * std::sin(elev));
    }
  }
  if (yaw_escape) {
    const double az = state.yaw + M_PI;
    endpoints.emplace_back(p.x + horizon * std::cos(az), p.y + horizon * std::sin(az),
                           p.z);
  }
  return endpoints;
}

Primitive make_primitive(const Pose& state, const Point3& endpoint, double T,
                         double sample_spacing) {
  Primitive prim;
  prim.start = state.position;
  prim.endpoint = endpoint;
  const double axes_start[3] = {state.position.x, state.position.y, state.position.z};
  const double axes_end[3] = {endpoint.x, endpoint.y, endpoint.z};
  for (int a = 0; a < 3; ++a) {
    prim.polys[a] = solve_min_snap_axis(axes_start[a], 0.0, 0.0, axes_end[a], 0.0, 0.0, T);
  }

  // Uniform time samples dense enough that no segment exceeds the requested
  // spacing: peak speed of the rest-to-rest quintic is 1.875 * L / T.
  const double length = distance(state.position, endpoint);
  const int n = std::max(2, static_cast<int>(std::ceil(1.875 * length / sample_spacing)));
  prim.samples.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = T * static_cast<double>(i) / n;
    Point3 p(eval_axis(prim.polys[0], t).position, eval_axis(prim.polys[1], t).position,
             eval_axis(prim.polys[2], t).position);
    prim.samples.emplace_back(p, t);
  }
  return prim;
}

CollisionCheck check_collision(const Primitive& prim, const KdIndex& index,
                               const CostConfig& cfg) {
  CollisionCheck result;
  if (index.empty()) {
    result.min_dist = std::numeric_limits<double>::infinity();
    result.status = PrimitiveStatus::Free;
    return result;
  }
  double min_dist = std::numeric_limits<double>::infinity();
  for (const auto& [p, t] : prim.samples) {
    min_dist = std::min(min_dist, index.nearest_distance(p));
  }
  result.min_dist = min_dist;
  if (min_dist <= cfg.collision_buffer) {
    result.status = PrimitiveStatus::Colliding;
  } else if (min_dist <= cfg.near_buffer) {
    result.status = PrimitiveStatus::NearCollision;
  } else {
    result.status = PrimitiveStatus::Free;
  }
  return result;
}

double primitive_cost(double goal_angle, double min_dist, const CostConfig& cfg) {
  double collision_term = 0.0;
  if (min_dist <= cfg.collision_buffer) {
    collision_term = cfg.collision_cost();
  } else if (min_dist <= cfg.near_buffer) {
    collision_term = cfg.near_collision_cost() - min_dist;
  }
  return collision_term + goal_angle * cfg.goal_weight;
}

std::optional<std::size_t> select_best(const std::vector<Primitive>& primitives) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    const Primitive& p = primitives[i];
    if (p.status == PrimitiveStatus::Colliding) continue;
    if (!best) {
      best = i;
      continue;
    }
    const Primitive& b = primitives[*best];
    if (p.cost < b.cost ||
        (p.cost == b.cost && std::abs(p.goal_angle) < std::abs(b.goal_angle))) {
      best = i;
    }
  }
  return best;
}

std::vector<Point3> barrier_descent(const std::vector<Point3>& obstacles,
                                    const Point3& start, const Point3& goal,
                                    int barrier_iters, int newton_iters,
                                    const BarrierDescentConfig& cfg) {
  std::vector<Point3> trace;
  if (distance(start, goal) < 1e-12) return trace;

  const double r2 = cfg.obstacle_radius * cfg.obstacle_radius;
  auto feasible = [&](const Eigen::Vector3d& x) {
    for (const Point3& o : obstacles) {
      if ((x - o.vec()).squaredNorm() <= r2) return false;
    }
    return true;
  };

  Eigen::Vector3d x = start.vec();
  const Eigen::Vector3d g_vec = goal.vec();
  double tj = cfg.t_initial;
  for (int j = 0; j < barrier_iters; ++j) {
    for (int k = 0; k < newton_iters; ++k) {
      Eigen::Vector3d grad = tj * (x - g_vec);
      Eigen::Matrix3d hess = tj * Eigen::Matrix3d::Identity();
      for (const Point3& o : obstacles) {
        const Eigen::Vector3d d = x - o.vec();
        const double s = d.squaredNorm() - r2;
        grad += -2.0 / s * d;
        hess += 4.0 / (s * s) * d * d.transpose() - 2.0 / s * Eigen::Matrix3d::Identity();
      }

      Eigen::Vector3d step;
      const Eigen::FullPivLU<Eigen::Matrix3d> lu(hess);
      if (lu.isInvertible()) {
        step = lu.solve(grad);
      } else {
        step = cfg.damped_step * grad;  // damped gradient fallback
      }
      if (!step.allFinite()) step = cfg.damped_step * grad;

      // Backtrack out of barrier violations.
      Eigen::Vector3d next = x - step;
      int backtracks = 0;
      while (!feasible(next) && backtracks < 32) {
        step *= 0.5;
        next = x - step;
        ++backtracks;
      }
      if (backtracks == 32) break;
      x = next;
      trace.push_back(Point3::from_vec(x));
    }
    tj *= cfg.t_growth;
  }
  return trace;
}

}  // namespace hybridnav
