#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hybridnav/cloud.hpp"
#include "hybridnav/mapping.hpp"
#include "hybridnav/position_target.hpp"

namespace hybridnav {

enum class MobilityMode {
  Idle,
  Hover,
  TakeOff,
  Land,
  FlyTo,
  FlyForward,
  DriveTo,
  DriveForward,
};
constexpr int kMobilityModeCount = 8;

const char* mobility_mode_name(MobilityMode m);

/// Legal mode transitions, row = from, column = to. Self-transitions are
/// allowed as holds.
extern const std::array<std::array<bool, kMobilityModeCount>, kMobilityModeCount>
    kTransitionTable;

bool request_transition(MobilityMode current, MobilityMode requested);

/// A goal produced by a running service. Forward/To services route through
/// the local planner (which does the obstacle avoidance); the hold-style
/// services publish their target directly.
struct ServiceGoal {
  PositionTarget target;
  bool via_planner = false;
};

struct ServiceParams {
  double takeoff_height = 1.0;     // m above ground
  double takeoff_tolerance = 0.05; // m
  double land_velocity = -0.3;     // zdot_land, m/s
  double land_filter_alpha = 0.2;  // first-order low-pass coefficient
  double landed_threshold = 0.17;  // wheel radius + 0.02 m
  double arrive_tolerance = 0.3;   // m, for the To services
  Point3 goal;                     // FlyTo / DriveTo target
};

struct ServiceInputs {
  Pose latest;
  double bottom_clearance = 0.0;
  double top_clearance = 0.0;
  double dt = 1.0 / 30.0;
};

struct ServiceTick {
  ServiceGoal goal;
  bool done = false;
  bool preempted = false;
};

/// Cooperative runner for one mobility service at a time. `tick` is driven
/// at the publisher rate; `events` receives "svc <name> event=<...>" lines.
class ServiceRunner {
 public:
  using EventSink = std::function<void(const std::string&)>;

  explicit ServiceRunner(EventSink events = nullptr) : events_(std::move(events)) {}

  /// Request a service; refused (returns false) if the transition table
  /// forbids it from the current mode.
  bool start(MobilityMode mode, const ServiceParams& params, const Pose& latest,
             double bottom_clearance);

  void preempt() { preempt_requested_ = true; }

  MobilityMode mode() const { return mode_; }
  bool active() const { return active_; }

  ServiceTick tick(const ServiceInputs& in);

 private:
  void emit(const std::string& event);

  EventSink events_;
  MobilityMode mode_ = MobilityMode::Idle;
  ServiceParams params_;
  bool active_ = false;
  bool preempt_requested_ = false;
  bool goal_emitted_ = false;
  Pose hold_pose_;
  double start_clearance_ = 0.0;
  double filtered_height_ = 0.0;
  bool filter_primed_ = false;
};

/// Behaviour sequence for one hybrid-path transition: same mode goes
/// straight to the goal, ground-to-air takes off first, air-to-ground lands
/// first.
std::vector<MobilityMode> hybrid_client_step(TravelMode prev_mode, TravelMode next_mode);

enum class LandingSiteStatus { Ok, TooRough, NoHeadroom };

/// Ground roughness (height variance of the downward-looking cloud) and
/// headroom check used before landing or takeoff decisions.
LandingSiteStatus landing_site_check(const PointCloud& bottom_cloud,
                                     double variance_threshold, double top_clearance,
                                     double min_top);

}  // namespace hybridnav
