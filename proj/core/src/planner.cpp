#include "hybridnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace hybridnav {

const char* planner_status_name(PlannerStatus s) {
  switch (s) {
    case PlannerStatus::Waiting: return "waiting";
    case PlannerStatus::Running: return "running";
    case PlannerStatus::Stuck: return "stuck";
  }
  return "unknown";
}

VerticalSmOutput vertical_sm_step(const VerticalSmState& sm, bool primitives_free,
                                  double bottom, double top) {
  VerticalSmOutput out;
  out.sm = sm;

  if (primitives_free) {
    out.sm.state = VerticalState::Forward;
    out.z_command = 0.0;
    return out;
  }

  switch (sm.state) {
    case VerticalState::Forward:
      out.sm.state = bottom > sm.min_bottom_clearance ? VerticalState::Descending
                                                      : VerticalState::Ascending;
      break;
    case VerticalState::Descending:
      if (bottom <= sm.min_bottom_clearance) out.sm.state = VerticalState::Ascending;
      break;
    case VerticalState::Ascending:
      if (top <= sm.min_top_clearance) out.sm.state = VerticalState::Descending;
      break;
  }
  out.z_command = out.sm.state == VerticalState::Descending ? -sm.vertical_speed
                                                            : sm.vertical_speed;
  return out;
}

WallFollowCommand wall_follow_plane_baseline(const PointCloud& cloud, double standoff,
                                             double k_p) {
  WallFollowCommand cmd;
  cmd.velocity = Point3(1.0, 0.0, 0.0);
  const auto plane = fit_plane(cloud, 0.05, 200, 42);
  if (!plane) return cmd;

  cmd.plane_found = true;
  const double d = std::abs(plane->d);  // distance from the camera to the wall
  const double wall_side = -plane->d * plane->b >= 0.0 ? 1.0 : -1.0;
  cmd.velocity.y = k_p * (d - standoff) * wall_side;
  return cmd;
}

void LocalPlanner::on_goal(const PlannerGoal& goal) {
  goal_ = goal;
  wall_follow_ = goal.frame == XyFrame::Body && std::abs(goal.point.x - 1.0) < 1e-9 &&
                 std::abs(goal.point.y) < 1e-9 && std::abs(goal.point.z) < 1e-9;
}

void LocalPlanner::on_pose(const Pose& pose, double stamp) {
  latest_pose_ = pose;
  pose_stamp_ = stamp;
  has_pose_ = true;
}

void LocalPlanner::on_clearance(double bottom, double top) {
  bottom_clearance_ = bottom;
  top_clearance_ = top;
}

Point3 LocalPlanner::goal_direction(const Pose& from) const {
  if (!goal_) return Point3(std::cos(from.yaw), std::sin(from.yaw), 0.0);
  if (goal_->frame == XyFrame::Body) {
    const Eigen::Vector3d d = rotation_matrix(from) * goal_->point.vec();
    return Point3::from_vec(d);
  }
  return goal_->point - from.position;
}

void LocalPlanner::on_point_cloud(const PointCloud& cloud, const Pose& state_at_stamp) {
  const std::size_t raw_size = cloud.size();

  PointCloud work = voxel_downsample(cloud, config_.voxel_size, config_.min_points_per_voxel);
  work = transform_cloud(work, config_.sensor_extrinsics, Frame::Body);
  work = crop_box_remove(work, config_.crop_min, config_.crop_max);
  work = transform_cloud(work, state_at_stamp, Frame::Odometry);

  const CloudStatus cloud_status = classify_cloud_status(raw_size, work.size());
  if (cloud_status == CloudStatus::Noisy) return;  // keep the previous selection

  if (config_.dust_filter_enabled) {
    work = dust_filter(work, config_.dust_window, config_.dust_variance_threshold).cloud;
  }

  if (std::abs(state_at_stamp.pitch) > config_.pitch_truncation_threshold) {
    // Occlude the ground band the pitched sensor sweeps through.
    const double z_cut =
        state_at_stamp.position.z - config_.wheel_radius + config_.ground_margin;
    PointCloud truncated;
    truncated.frame = work.frame;
    truncated.stamp = work.stamp;
    truncated.sensor_origin = work.sensor_origin;
    for (const Point3& p : work.points) {
      if (p.z > z_cut) truncated.points.push_back(p);
    }
    work = std::move(truncated);
  }

  processed_cloud_ = std::move(work);
  index_ = KdIndex(processed_cloud_);

  const bool aerial = goal_ && goal_->mobility == Mobility::Aerial;
  std::vector<double> rows = {0.0};
  if (aerial) rows = {-config_.elevation_row, 0.0, config_.elevation_row};

  const auto endpoints =
      generate_endpoints(state_at_stamp, config_.horizon, config_.effective_fov(),
                         config_.n_azimuth, rows, config_.yaw_escape);

  const Point3 goal_dir = goal_direction(state_at_stamp);
  const double goal_norm = goal_dir.norm();

  primitives_.clear();
  primitives_.reserve(endpoints.size());
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    Primitive prim = make_primitive(state_at_stamp, endpoints[i], config_.primitive_T,
                                    config_.sample_spacing);
    prim.index = i;
    const auto check = check_collision(prim, index_, config_.cost);
    prim.min_obstacle_dist = check.min_dist;
    prim.status = check.status;

    const Point3 ep_dir = endpoints[i] - state_at_stamp.position;
    const double denom = ep_dir.norm() * goal_norm;
    double a_g = 0.0;
    if (denom > 1e-12) {
      const double cosang =
          (ep_dir.x * goal_dir.x + ep_dir.y * goal_dir.y + ep_dir.z * goal_dir.z) / denom;
      a_g = std::acos(std::clamp(cosang, -1.0, 1.0));
    }
    prim.goal_angle = a_g;
    prim.cost = primitive_cost(a_g, check.min_dist, config_.cost);
    primitives_.push_back(std::move(prim));
  }

  selected_ = select_best(primitives_);
  selection_pose_ = state_at_stamp;
  has_selection_round_ = true;
  status_ = selected_ ? PlannerStatus::Running : PlannerStatus::Stuck;
}

LocalPlanner::TickResult LocalPlanner::tick_publish(double now) {
  TickResult out;
  const Mobility mobility = goal_ ? goal_->mobility : Mobility::Ground;

  PositionTarget& t = out.target;
  t.mobility = mobility;
  t.xy_mode = ControlMode::Velocity;
  t.xy_frame = mobility == Mobility::Ground ? XyFrame::Body : XyFrame::Odometry;
  t.z_mode = ControlMode::Velocity;
  t.z_frame = ZFrame::Odometry;

  if (!has_selection_round_ || !goal_) {
    out.status = PlannerStatus::Waiting;  // hold until the first selection
  } else if (!selected_) {
    out.status = PlannerStatus::Stuck;
    if (mobility == Mobility::Aerial) {
      const auto sm = vertical_sm_step(vertical_sm_, false, bottom_clearance_,
                                       top_clearance_);
      vertical_sm_ = sm.sm;
      t.velocity.z = sm.z_command;
    }
  } else {
    out.status = PlannerStatus::Running;
    vertical_sm_ = vertical_sm_step(vertical_sm_, true, bottom_clearance_,
                                    top_clearance_).sm;

    const Primitive& best = primitives_[*selected_];
    const Point3 dir_raw = best.endpoint - selection_pose_.position;
    const double norm = dir_raw.norm();
    const Point3 dir = norm > 1e-9 ? dir_raw * (1.0 / norm) : Point3(1, 0, 0);
    const double speed = config_.horizon / config_.primitive_T;
    const Pose& pose = has_pose_ ? latest_pose_ : selection_pose_;
    const double heading = std::atan2(dir.y, dir.x);

    if (mobility == Mobility::Ground) {
      const double yaw_err = s1_distance(heading, pose.yaw);
      t.yaw_rate = std::clamp(config_.yaw_gain * yaw_err, -config_.max_yaw_rate,
                              config_.max_yaw_rate);
      t.velocity.x = speed * std::max(0.0, std::cos(yaw_err));
    } else {
      t.velocity.x = speed * dir.x;
      t.velocity.y = speed * dir.y;
      t.velocity.z = speed * dir.z;
      t.yaw = heading;
    }
  }

  status_ = out.status;
  if (log_) {
    char buf[160];
    char sel[24] = "none";
    char cost[24] = "-";
    if (selected_ && out.status != PlannerStatus::Waiting) {
      std::snprintf(sel, sizeof sel, "%zu", *selected_);
      std::snprintf(cost, sizeof cost, "%.3f", primitives_[*selected_].cost);
    }
    std::snprintf(buf, sizeof buf,
                  "tick t=%.3f status=%s sel=%s cost=%s vcmd=%.3f,%.3f,%.3f", now,
                  planner_status_name(out.status), sel, cost, t.velocity.x, t.velocity.y,
                  t.velocity.z);
    log_(buf);
  }
  return out;
}

void LocalPlanner::reset() {
  goal_.reset();
  wall_follow_ = false;
  has_pose_ = false;
  bottom_clearance_ = 0.0;
  top_clearance_ = 1e9;
  processed_cloud_ = PointCloud{};
  index_ = KdIndex();
  primitives_.clear();
  selected_.reset();
  has_selection_round_ = false;
  status_ = PlannerStatus::Waiting;
  vertical_sm_ = config_.vertical;
}

}  // namespace hybridnav
