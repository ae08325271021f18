#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hybridnav/cloud.hpp"
#include "hybridnav/kdtree.hpp"
#include "hybridnav/position_target.hpp"

namespace hybridnav {

/// Kinematic vehicle state. Roll and pitch are identically zero and ground
/// mode pins z to the wheel radius.
struct VehicleState {
  Pose pose;
  double forward_velocity = 0.0;  // body x, m/s
  Mobility mobility = Mobility::Ground;
  double stamp = 0.0;
};

struct SimParams {
  double planning_horizon_T = 1.875;  // s, position-mode velocity scaling
  double yaw_rate_limit = 1.5;        // psi_dot_o, rad/s
  double z_rate_limit = 0.5;          // z_dot_o, m/s
  double wheel_radius = 0.15;         // m
  double vehicle_radius = 0.35;       // m, collision sphere
  double lidar_max_range = 8.0;       // m
  double lidar_min_depth = 0.5;       // m
  double lidar_elevation_fov = 15.0 * M_PI / 180.0;  // rad, +/- band
  int lidar_rings = 16;
};

/// Static obstacle points plus an analytic ground plane and ceiling.
struct WorldGeometry {
  PointCloud obstacles;  // odometry frame
  KdIndex index;
  double ground_z = 0.0;
  double ceiling_height = 2.5;

  void rebuild_index() { index = KdIndex(obstacles); }
};

/// One step of the ground-mode dynamics; throws on a body-frame position
/// target (not defined for this mode).
VehicleState step_ground(const VehicleState& state, const PositionTarget& target,
                         double dt, const SimParams& params);

/// One step of the aerial x-y dynamics plus the rate-limited yaw slew. The
/// slew clamps at the desired yaw instead of overshooting.
VehicleState step_aerial(const VehicleState& state, const PositionTarget& target,
                         double dt, const SimParams& params);

/// New z per the z-frame tag: position targets slew at the z rate limit and
/// clamp at the goal (offset by the ground height or bounded by the ceiling),
/// velocity targets integrate directly.
double step_z(const VehicleState& state, const PositionTarget& target, double dt,
              const SimParams& params, double ground_z, double ceiling_z);

/// Full state update combining the pieces above.
VehicleState advance(const VehicleState& state, const PositionTarget& target, double dt,
                     const SimParams& params, const WorldGeometry& world);

/// Simulated spinning LIDAR: world points within range, beyond the minimum
/// depth, inside the elevation band, expressed in the sensor frame with ring
/// ids assigned by elevation.
PointCloud sense_lidar(const WorldGeometry& world, const Pose& pose,
                       const SimParams& params);

/// d_bc = min(s1, s2) + r_wheel.
double bottom_clearance(double sonar1, double sonar2, double wheel_radius);

/// Downward sonar reading from one wheel against the analytic ground.
double sonar_reading(const VehicleState& state, const SimParams& params, double ground_z);

/// True when any obstacle point is within the vehicle radius or the vehicle
/// sphere pokes above the ceiling.
bool collision_check(const WorldGeometry& world, const Pose& pose, double vehicle_radius,
                     double ceiling_height);

enum class EnvStatus {
  NotTesting,
  Incomplete,
  InProgress,
  Stuck,
  Collided,
  Successful,
  Timeout,
};

const char* env_status_name(EnvStatus s);

/// One unit-test course.
struct Environment {
  std::string name;
  Pose start;
  double end_x_range[2] = {0.0, 0.0};
  double end_y_range[2] = {0.0, 0.0};
  EnvStatus status = EnvStatus::Incomplete;
  double start_time = 0.0;
  double ceiling_height = 2.5;
  bool enabled = true;

  bool inside_end_range(const Point3& p) const {
    return p.x >= end_x_range[0] && p.x <= end_x_range[1] && p.y >= end_y_range[0] &&
           p.y <= end_y_range[1];
  }
};

struct EnvReportEntry {
  std::string name;
  EnvStatus status = EnvStatus::NotTesting;
  double event_time = 0.0;  // time of the terminal event, relative to env start
};

struct EnvEvent {
  enum class Kind { StuckReported, Collided, ReachedEnd, Tick };
  Kind kind = Kind::Tick;
  double time = 0.0;
  Point3 pose;  // used by ReachedEnd
};

struct AdvanceTo {
  std::size_t env_index;
  Pose start;
};
struct Finished {
  std::vector<EnvReportEntry> report;
};
struct Continue {};
using EnvAction = std::variant<Continue, AdvanceTo, Finished>;

/// Sequences the vehicle through the environment list: first incomplete
/// enabled course runs until a terminal status, then the next is selected
/// with the vehicle teleported to its start.
class EnvManager {
 public:
  explicit EnvManager(std::vector<Environment> envs, double timeout = 60.0);

  /// Select the first environment. Returns AdvanceTo or Finished.
  EnvAction start(double now);

  EnvAction step(const EnvEvent& event);

  const Environment& current() const { return envs_.at(current_); }
  const std::vector<Environment>& environments() const { return envs_; }
  bool running() const { return running_; }

 private:
  EnvAction select_next(double now);
  void finish_current(EnvStatus status, double now);

  std::vector<Environment> envs_;
  std::vector<double> event_times_;
  double timeout_;
  std::size_t current_ = 0;
  bool running_ = false;
};

}  // namespace hybridnav
