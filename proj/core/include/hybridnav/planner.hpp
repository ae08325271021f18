#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hybridnav/cloud.hpp"
#include "hybridnav/kdtree.hpp"
#include "hybridnav/position_target.hpp"
#include "hybridnav/primitives.hpp"

namespace hybridnav {

enum class PlannerStatus { Waiting, Running, Stuck };

const char* planner_status_name(PlannerStatus s);

enum class VerticalState { Forward, Descending, Ascending };

struct VerticalSmState {
  VerticalState state = VerticalState::Forward;
  double min_bottom_clearance = 0.5;
  double min_top_clearance = 0.5;
  double vertical_speed = 0.4;  // m/s commanded while searching
};

struct VerticalSmOutput {
  VerticalSmState sm;
  double z_command = 0.0;  // signed climb rate
};

/// One step of the vertical search: forward while primitives are available,
/// otherwise descend to the minimum bottom clearance, then climb to the
/// minimum top clearance, bouncing between the two until a primitive frees up.
VerticalSmOutput vertical_sm_step(const VerticalSmState& sm, bool primitives_free,
                                  double bottom, double top);

struct PlannerConfig {
  // Cloud pipeline.
  double voxel_size = 0.15;
  int min_points_per_voxel = 1;
  Point3 crop_min{-0.35, -0.45, -0.30};
  Point3 crop_max{0.35, 0.45, 0.25};
  Pose sensor_extrinsics{};  // sensor -> body
  bool dust_filter_enabled = true;
  int dust_window = 5;
  double dust_variance_threshold = 0.05;
  double wheel_radius = 0.15;
  double ground_margin = 0.02;  // keep z above wheel bottom + margin when pitched
  double pitch_truncation_threshold = 2.0 * M_PI / 180.0;

  // Primitives.
  double horizon = 1.5;        // m
  double primitive_T = 1.875;  // s; horizon/T is the cruise speed
  int n_azimuth = 9;
  double sensor_azimuth_fov = 2.0 * M_PI;
  double fov_margin = 5.0 * M_PI / 180.0;  // shaved off each edge of a partial fov
  double elevation_row = 15.0 * M_PI / 180.0;  // +/- row used in aerial mode
  bool yaw_escape = true;
  double sample_spacing = 0.1;
  CostConfig cost;

  // Velocity command shaping.
  double yaw_gain = 2.0;
  double max_yaw_rate = 1.5;

  VerticalSmState vertical;

  /// Endpoint fov after the jitter margin is removed from a partial fov.
  double effective_fov() const {
    if (sensor_azimuth_fov >= 2.0 * M_PI - 1e-9) return 2.0 * M_PI;
    return std::max(0.0, sensor_azimuth_fov - 2.0 * fov_margin);
  }
};

/// Goal for the local planner. A body-frame goal at (1,0,0) selects the
/// wall-following behaviour; an odometry-frame goal is sought directly.
struct PlannerGoal {
  Point3 point{1.0, 0.0, 0.0};
  XyFrame frame = XyFrame::Body;
  ZFrame z_frame = ZFrame::Ground;
  double z_value = 0.0;
  Mobility mobility = Mobility::Ground;
};

struct WallFollowCommand {
  Point3 velocity;  // body frame: unit forward plus the lateral correction
  bool plane_found = false;
};

/// Plane-fit wall-following baseline: fit the wall, command a lateral
/// velocity proportional to the standoff error.
WallFollowCommand wall_follow_plane_baseline(const PointCloud& cloud, double standoff,
                                             double k_p);

/// The local planner: ingests stamped clouds, builds and scores a primitive
/// batch, and publishes velocity targets at the tick rate. Single-threaded;
/// the caller serializes callbacks and ticks.
class LocalPlanner {
 public:
  using LogSink = std::function<void(const std::string&)>;

  explicit LocalPlanner(PlannerConfig config = {}, LogSink log = nullptr)
      : config_(config), log_(std::move(log)), vertical_sm_(config.vertical) {}

  const PlannerConfig& config() const { return config_; }

  void on_goal(const PlannerGoal& goal);
  void on_pose(const Pose& pose, double stamp);
  void on_clearance(double bottom, double top);

  /// Full pipeline on a sensor-frame cloud using the state saved at the
  /// cloud's stamp (not the latest state).
  void on_point_cloud(const PointCloud& cloud, const Pose& state_at_stamp);

  struct TickResult {
    PositionTarget target;
    PlannerStatus status = PlannerStatus::Waiting;
  };

  TickResult tick_publish(double now);

  PlannerStatus status() const { return status_; }
  bool wall_follow_mode() const { return wall_follow_; }
  const std::vector<Primitive>& primitives() const { return primitives_; }
  std::optional<std::size_t> selected() const { return selected_; }
  const PointCloud& processed_cloud() const { return processed_cloud_; }
  const VerticalSmState& vertical_sm() const { return vertical_sm_; }

  void reset();

 private:
  Point3 goal_direction(const Pose& from) const;

  PlannerConfig config_;
  LogSink log_;

  std::optional<PlannerGoal> goal_;
  bool wall_follow_ = false;
  Pose latest_pose_;
  double pose_stamp_ = 0.0;
  bool has_pose_ = false;
  double bottom_clearance_ = 0.0;
  double top_clearance_ = 1e9;

  PointCloud processed_cloud_;
  KdIndex index_;
  std::vector<Primitive> primitives_;
  std::optional<std::size_t> selected_;
  Pose selection_pose_;
  bool has_selection_round_ = false;
  PlannerStatus status_ = PlannerStatus::Waiting;
  VerticalSmState vertical_sm_;
};

}  // namespace hybridnav
