#include "hybridnav/mobility.hpp"

#include <cmath>

namespace hybridnav {

const char* mobility_name(Mobility m) {
  return m == Mobility::Aerial ? "aerial" : "ground";
}

const char* mobility_mode_name(MobilityMode m) {
  switch (m) {
    case MobilityMode::Idle: return "idle";
    case MobilityMode::Hover: return "hover";
    case MobilityMode::TakeOff: return "take_off";
    case MobilityMode::Land: return "land";
    case MobilityMode::FlyTo: return "fly_to";
    case MobilityMode::FlyForward: return "fly_forward";
    case MobilityMode::DriveTo: return "drive_to";
    case MobilityMode::DriveForward: return "drive_forward";
  }
  return "unknown";
}

// Row = from, column = to, in enum order:
// idle, hover, take_off, land, fly_to, fly_forward, drive_to, drive_forward.
const std::array<std::array<bool, kMobilityModeCount>, kMobilityModeCount>
    kTransitionTable = {{
        {1, 0, 1, 0, 0, 0, 1, 1},  // idle
        {0, 1, 0, 1, 1, 1, 0, 0},  // hover
        {0, 1, 1, 1, 1, 1, 0, 0},  // take_off
        {0, 1, 1, 1, 1, 1, 0, 0},  // land
        {0, 1, 0, 1, 1, 1, 0, 0},  // fly_to
        {0, 1, 0, 1, 1, 1, 0, 0},  // fly_forward
        {1, 1, 1, 0, 0, 0, 1, 1},  // drive_to
        {1, 0, 1, 0, 0, 0, 1, 1},  // drive_forward
    }};

bool request_transition(MobilityMode current, MobilityMode requested) {
  return kTransitionTable[static_cast<int>(current)][static_cast<int>(requested)];
}

void ServiceRunner::emit(const std::string& event) {
  if (events_) {
    events_("svc " + std::string(mobility_mode_name(mode_)) + " event=" + event);
  }
}

bool ServiceRunner::start(MobilityMode mode, const ServiceParams& params,
                          const Pose& latest, double bottom_clearance) {
  if (!request_transition(mode_, mode)) return false;
  mode_ = mode;
  params_ = params;
  active_ = true;
  preempt_requested_ = false;
  goal_emitted_ = false;
  hold_pose_ = latest;
  start_clearance_ = bottom_clearance;
  filtered_height_ = bottom_clearance;
  filter_primed_ = false;
  emit("started");
  return true;
}

ServiceTick ServiceRunner::tick(const ServiceInputs& in) {
  ServiceTick out;
  if (!active_) {
    out.done = true;
    return out;
  }

  PositionTarget& t = out.goal.target;
  switch (mode_) {
    case MobilityMode::Idle:
      // Hold pose on the ground.
      t.mobility = Mobility::Ground;
      t.xy_mode = ControlMode::Position;
      t.xy_frame = XyFrame::Odometry;
      t.z_mode = ControlMode::Position;
      t.z_frame = ZFrame::Ground;
      t.position = Point3(hold_pose_.position.x, hold_pose_.position.y, 0.0);
      t.yaw = hold_pose_.yaw;
      break;

    case MobilityMode::Hover:
      t.mobility = Mobility::Aerial;
      t.xy_mode = ControlMode::Position;
      t.xy_frame = XyFrame::Odometry;
      t.z_mode = ControlMode::Position;
      t.z_frame = ZFrame::Odometry;
      t.position = hold_pose_.position;
      t.yaw = hold_pose_.yaw;
      break;

    case MobilityMode::TakeOff:
      t.mobility = Mobility::Aerial;
      t.xy_mode = ControlMode::Position;
      t.xy_frame = XyFrame::Odometry;
      t.z_mode = ControlMode::Position;
      t.z_frame = ZFrame::Ground;
      t.position = Point3(hold_pose_.position.x, hold_pose_.position.y,
                          params_.takeoff_height);
      t.yaw = hold_pose_.yaw;
      if (std::abs(params_.takeoff_height - in.bottom_clearance) <
          params_.takeoff_tolerance) {
        out.done = true;
      }
      break;

    case MobilityMode::Land: {
      t.mobility = Mobility::Aerial;
      t.xy_mode = ControlMode::Position;
      t.xy_frame = XyFrame::Odometry;
      t.z_mode = ControlMode::Velocity;
      t.z_frame = ZFrame::Odometry;
      t.position = Point3(hold_pose_.position.x, hold_pose_.position.y, 0.0);
      t.velocity = Point3(0.0, 0.0, params_.land_velocity);
      t.yaw = hold_pose_.yaw;
      if (!filter_primed_) {
        filtered_height_ = in.bottom_clearance;
        filter_primed_ = true;
      } else {
        filtered_height_ +=
            params_.land_filter_alpha * (in.bottom_clearance - filtered_height_);
      }
      if (filtered_height_ < params_.landed_threshold) {
        // Landed: final hold goal on the ground at the latest state.
        t.mobility = Mobility::Ground;
        t.z_mode = ControlMode::Position;
        t.z_frame = ZFrame::Ground;
        t.position = Point3(in.latest.position.x, in.latest.position.y, 0.0);
        t.velocity = Point3();
        t.yaw = in.latest.yaw;
        out.done = true;
      }
      break;
    }

    case MobilityMode::FlyTo:
      t.mobility = Mobility::Aerial;
      t.xy_mode = ControlMode::Position;
      t.xy_frame = XyFrame::Odometry;
      t.z_mode = ControlMode::Position;
      t.z_frame = ZFrame::Ground;
      t.position = params_.goal;
      out.goal.via_planner = true;
      if (std::hypot(params_.goal.x - in.latest.position.x,
                     params_.goal.y - in.latest.position.y) < params_.arrive_tolerance) {
        out.done = true;
      }
      break;

    case MobilityMode::FlyForward:
      t.mobility = Mobility::Aerial;
      t.xy_mode = ControlMode::Position;
      t.xy_frame = XyFrame::Body;
      t.z_mode = ControlMode::Position;
      t.z_frame = ZFrame::Ground;
      t.position = Point3(1.0, 0.0, start_clearance_);
      out.goal.via_planner = true;
      break;

    case MobilityMode::DriveTo:
      t.mobility = Mobility::Ground;
      t.xy_mode = ControlMode::Position;
      t.xy_frame = XyFrame::Odometry;
      t.z_mode = ControlMode::Position;
      t.z_frame = ZFrame::Ground;
      t.position = Point3(params_.goal.x, params_.goal.y, 0.0);
      out.goal.via_planner = true;
      if (std::hypot(params_.goal.x - in.latest.position.x,
                     params_.goal.y - in.latest.position.y) < params_.arrive_tolerance) {
        out.done = true;
      }
      break;

    case MobilityMode::DriveForward:
      t.mobility = Mobility::Ground;
      t.xy_mode = ControlMode::Position;
      t.xy_frame = XyFrame::Body;
      t.z_mode = ControlMode::Position;
      t.z_frame = ZFrame::Ground;
      t.position = Point3(1.0, 0.0, 0.0);
      out.goal.via_planner = true;
      break;
  }

  if (preempt_requested_) {
    // Final hold goal, then the stream terminates.
    t.xy_mode = ControlMode::Position;
    t.xy_frame = XyFrame::Odometry;
    t.position = in.latest.position;
    t.velocity = Point3();
    t.yaw = in.latest.yaw;
    out.goal.via_planner = false;
    out.preempted = true;
    out.done = true;
    emit("preempted");
    active_ = false;
    return out;
  }

  if (!goal_emitted_) {
    emit("goal");
    goal_emitted_ = true;
  }
  if (out.done) {
    emit("done");
    active_ = false;
  }
  return out;
}

std::vector<MobilityMode> hybrid_client_step(TravelMode prev_mode, TravelMode next_mode) {
  if (prev_mode == next_mode) {
    return {prev_mode == TravelMode::Ground ? MobilityMode::DriveTo : MobilityMode::FlyTo};
  }
  if (prev_mode == TravelMode::Ground) {
    return {MobilityMode::TakeOff, MobilityMode::FlyTo};
  }
  return {MobilityMode::Land, MobilityMode::DriveTo};
}

LandingSiteStatus landing_site_check(const PointCloud& bottom_cloud,
                                     double variance_threshold, double top_clearance,
                                     double min_top) {
  if (bottom_cloud.empty()) return LandingSiteStatus::TooRough;

  double mean = 0.0;
  for (const Point3& p : bottom_cloud.points) mean += p.z;
  mean /= static_cast<double>(bottom_cloud.size());
  double var = 0.0;
  for (const Point3& p : bottom_cloud.points) {
    var += (p.z - mean) * (p.z - mean);
  }
  var /= static_cast<double>(bottom_cloud.size());
  if (var > variance_threshold) return LandingSiteStatus::TooRough;

  if (top_clearance < min_top) return LandingSiteStatus::NoHeadroom;
  return LandingSiteStatus::Ok;
}

}  // namespace hybridnav
