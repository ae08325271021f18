#pragma once

#include "hybridnav/geometry.hpp"

namespace hybridnav {

enum class Mobility { Aerial, Ground };
enum class ControlMode { Position, Velocity };
enum class XyFrame { Odometry, Body };
enum class ZFrame { Odometry, Body, Ground, Ceiling };

/// The planner -> controller/simulator contract: which mobility mode is
/// active and how the desired state fields are to be interpreted per axis.
struct PositionTarget {
  Mobility mobility = Mobility::Ground;
  ControlMode xy_mode = ControlMode::Velocity;
  ControlMode z_mode = ControlMode::Position;
  XyFrame xy_frame = XyFrame::Body;
  ZFrame z_frame = ZFrame::Odometry;
  Point3 position;   // desired position, interpreted per the frame tags
  Point3 velocity;   // desired velocity, interpreted per the frame tags
  double yaw = 0.0;      // desired yaw (aerial position control)
  double yaw_rate = 0.0; // desired yaw rate (velocity control)
};

/// Combinations the simulator dynamics accept. Body-frame position control
/// is not defined for either axis group.
inline bool is_valid_combination(const PositionTarget& t) {
  if (t.xy_frame == XyFrame::Body && t.xy_mode == ControlMode::Position) return false;
  if (t.z_frame == ZFrame::Body && t.z_mode == ControlMode::Position) return false;
  return true;
}

const char* mobility_name(Mobility m);

}  // namespace hybridnav
