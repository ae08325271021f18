#include "hybridnav/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybridnav {

namespace {

/// Slew `value` toward `target` by at most rate*dt, clamping at the target.
double slew_toward(double value, double target, double rate, double dt) {
  if (target < value) {
    double next = value - dt * rate;
    if (next < target) next = target;
    return next;
  }
  if (target > value) {
    double next = value + dt * rate;
    if (next > target) next = target;
    return next;
  }
  return value;
}

}  // namespace

VehicleState step_ground(const VehicleState& state, const PositionTarget& target,
                         double dt, const SimParams& params) {
  if (target.xy_frame == XyFrame::Body && target.xy_mode == ControlMode::Position) {
    throw std::invalid_argument("ground dynamics: body-frame position control");
  }

  const Pose& pose = state.pose;
  double delta_yaw = 0.0;
  double v_body_x = 0.0;

  if (target.xy_frame == XyFrame::Odometry) {
    if (target.xy_mode == ControlMode::Position) {
      delta_yaw = s1_distance(target.yaw, pose.yaw);
      const double T = params.planning_horizon_T;
      const double v_xd = (target.position.x - pose.position.x) / T;
      const double v_yd = (target.position.y - pose.position.y) / T;
      v_body_x = v_xd * std::cos(pose.yaw) + v_yd * std::sin(pose.yaw);
    } else {
      delta_yaw = target.yaw_rate * dt;
      v_body_x = target.velocity.x * std::cos(pose.yaw) +
                 target.velocity.y * std::sin(pose.yaw);
    }
  } else {  // body frame, velocity mode
    delta_yaw = target.yaw_rate * dt;
    v_body_x = target.velocity.x;
  }

  VehicleState next = state;
  next.pose.yaw = wrap_angle(pose.yaw + delta_yaw);
  next.pose.position.x = pose.position.x + v_body_x * dt * std::cos(next.pose.yaw);
  next.pose.position.y = pose.position.y + v_body_x * dt * std::sin(next.pose.yaw);
  next.pose.position.z = params.wheel_radius;
  next.forward_velocity = v_body_x;
  next.mobility = Mobility::Ground;
  return next;
}

VehicleState step_aerial(const VehicleState& state, const PositionTarget& target,
                         double dt, const SimParams& params) {
  if (target.xy_frame == XyFrame::Body && target.xy_mode == ControlMode::Position) {
    throw std::invalid_argument("aerial dynamics: body-frame position control");
  }

  const Pose& pose = state.pose;
  VehicleState next = state;
  next.mobility = Mobility::Aerial;

  if (target.xy_frame == XyFrame::Odometry) {
    if (target.xy_mode == ControlMode::Position) {
      const double T = params.planning_horizon_T;
      next.pose.position.x += (target.position.x - pose.position.x) / T * dt;
      next.pose.position.y += (target.position.y - pose.position.y) / T * dt;
    } else {
      next.pose.position.x += target.velocity.x * dt;
      next.pose.position.y += target.velocity.y * dt;
    }
  } else {
    // Body-frame velocity rotated by the latest yaw.
    const double cy = std::cos(pose.yaw), sy = std::sin(pose.yaw);
    next.pose.position.x += (target.velocity.x * cy - target.velocity.y * sy) * dt;
    next.pose.position.y += (target.velocity.x * sy + target.velocity.y * cy) * dt;
  }

  // Yaw slews toward the desired value at the configured rate and clamps
  // there rather than overshooting.
  const double err = s1_distance(target.yaw, pose.yaw);
  const double max_step = params.yaw_rate_limit * dt;
  double applied = std::clamp(err, -max_step, max_step);
  next.pose.yaw = wrap_angle(pose.yaw + applied);

  const double vx = (next.pose.position.x - pose.position.x) / std::max(dt, 1e-9);
  const double vy = (next.pose.position.y - pose.position.y) / std::max(dt, 1e-9);
  next.forward_velocity = std::hypot(vx, vy);
  return next;
}

double step_z(const VehicleState& state, const PositionTarget& target, double dt,
              const SimParams& params, double ground_z, double ceiling_z) {
  const double z = state.pose.position.z;

  switch (target.z_frame) {
    case ZFrame::Body:
      if (target.z_mode == ControlMode::Position) {
        throw std::invalid_argument("z dynamics: body-frame position control");
      }
      // Desired body-frame offset spread over the planning horizon.
      return z + target.position.z / params.planning_horizon_T * dt;

    case ZFrame::Odometry:
      if (target.z_mode == ControlMode::Position) {
        return slew_toward(z, target.position.z, params.z_rate_limit, dt);
      }
      return z + target.velocity.z * dt;

    case ZFrame::Ground:
      if (target.z_mode == ControlMode::Position) {
        return slew_toward(z, target.position.z + ground_z, params.z_rate_limit, dt);
      }
      return z + target.velocity.z * dt;

    case ZFrame::Ceiling:
      if (target.z_mode == ControlMode::Position) {
        return slew_toward(z, ceiling_z - target.position.z, params.z_rate_limit, dt);
      }
      return z + target.velocity.z * dt;
  }
  return z;
}

VehicleState advance(const VehicleState& state, const PositionTarget& target, double dt,
                     const SimParams& params, const WorldGeometry& world) {
  VehicleState next = target.mobility == Mobility::Ground
                          ? step_ground(state, target, dt, params)
                          : step_aerial(state, target, dt, params);
  if (target.mobility == Mobility::Aerial) {
    next.pose.position.z =
        step_z(state, target, dt, params, world.ground_z, world.ceiling_height);
  }
  next.stamp = state.stamp + dt;
  return next;
}

PointCloud sense_lidar(const WorldGeometry& world, const Pose& pose,
                       const SimParams& params) {
  PointCloud cloud;
  cloud.frame = Frame::Sensor;
  const Eigen::Matrix3d r_inv = rotation_matrix(pose).transpose();
  const Eigen::Vector3d origin = pose.position.vec();

  for (const Point3& p : world.obstacles.points) {
    const Eigen::Vector3d d = p.vec() - origin;
    const double range = d.norm();
    if (range > params.lidar_max_range || range <= params.lidar_min_depth) continue;
    const double elevation = std::asin(std::clamp(d.z() / range, -1.0, 1.0));
    if (std::abs(elevation) > params.lidar_elevation_fov) continue;

    Point3 q = Point3::from_vec(r_inv * d);
    const double band = 2.0 * params.lidar_elevation_fov;
    int ring = static_cast<int>(std::floor((elevation + params.lidar_elevation_fov) /
                                           band * params.lidar_rings));
    q.ring = std::clamp(ring, 0, params.lidar_rings - 1);
    cloud.points.push_back(q);
  }
  return cloud;
}

double bottom_clearance(double sonar1, double sonar2, double wheel_radius) {
  return std::min(sonar1, sonar2) + wheel_radius;
}

double sonar_reading(const VehicleState& state, const SimParams& params, double ground_z) {
  return std::max(0.0, state.pose.position.z - params.wheel_radius - ground_z);
}

bool collision_check(const WorldGeometry& world, const Pose& pose, double vehicle_radius,
                     double ceiling_height) {
  if (pose.position.z + vehicle_radius > ceiling_height) return true;
  if (world.index.empty()) return false;
  return world.index.nearest_distance(pose.position) < vehicle_radius;
}

const char* env_status_name(EnvStatus s) {
  switch (s) {
    case EnvStatus::NotTesting: return "NOT_TESTING";
    case EnvStatus::Incomplete: return "INCOMPLETE";
    case EnvStatus::InProgress: return "IN_PROGRESS";
    case EnvStatus::Stuck: return "STUCK";
    case EnvStatus::Collided: return "COLLIDED";
    case EnvStatus::Successful: return "SUCCESSFUL";
    case EnvStatus::Timeout: return "TIMEOUT";
  }
  return "UNKNOWN";
}

EnvManager::EnvManager(std::vector<Environment> envs, double timeout)
    : envs_(std::move(envs)), timeout_(timeout) {
  event_times_.assign(envs_.size(), 0.0);
  for (Environment& env : envs_) {
    env.status = env.enabled ? EnvStatus::Incomplete : EnvStatus::NotTesting;
  }
}

EnvAction EnvManager::start(double now) { return select_next(now); }

EnvAction EnvManager::select_next(double now) {
  for (std::size_t i = 0; i < envs_.size(); ++i) {
    if (envs_[i].status == EnvStatus::Incomplete) {
      // New-environment procedure: mark in progress, move the vehicle to the
      // start, restart the clock, clear the per-run flags.
      current_ = i;
      envs_[i].status = EnvStatus::InProgress;
      envs_[i].start_time = now;
      running_ = true;
      return AdvanceTo{i, envs_[i].start};
    }
  }
  running_ = false;
  Finished fin;
  fin.report.reserve(envs_.size());
  for (std::size_t i = 0; i < envs_.size(); ++i) {
    fin.report.push_back({envs_[i].name, envs_[i].status, event_times_[i]});
  }
  return fin;
}

void EnvManager::finish_current(EnvStatus status, double now) {
  envs_[current_].status = status;
  event_times_[current_] = now - envs_[current_].start_time;
}

EnvAction EnvManager::step(const EnvEvent& event) {
  if (!running_) return Continue{};
  Environment& env = envs_[current_];

  switch (event.kind) {
    case EnvEvent::Kind::StuckReported:
      finish_current(EnvStatus::Stuck, event.time);
      return select_next(event.time);
    case EnvEvent::Kind::Collided:
      finish_current(EnvStatus::Collided, event.time);
      return select_next(event.time);
    case EnvEvent::Kind::ReachedEnd:
      if (env.inside_end_range(event.pose)) {
        finish_current(EnvStatus::Successful, event.time);
        return select_next(event.time);
      }
      return Continue{};
    case EnvEvent::Kind::Tick:
      if (event.time - env.start_time > timeout_) {
        finish_current(EnvStatus::Timeout, event.time);
        return select_next(event.time);
      }
      return Continue{};
  }
  return Continue{};
}

}  // namespace hybridnav
