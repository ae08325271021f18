#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "hybridnav/geometry.hpp"

namespace hybridnav {

struct ControllerGains {
  double pos_kp = 1.0;
  double yaw_kp = 2.0;
  double yaw_kd = 0.2;
  double vel_kd = 1.0;
  double vel_ki = 0.1;
  double pitch_kp = 2.0;
  double pitch_kd = 0.3;
  double pitch_ki = 0.05;
};

struct ControllerState {
  double chi1 = 0.0;  // velocity-error integrator
  double chi2 = 0.0;  // pitch-error integrator
  double integrator_clamp = 5.0;
  double prev_yaw_error = 0.0;
  bool has_prev_yaw_error = false;
};

struct RollingControlInput {
  Eigen::Vector2d position{0.0, 0.0};  // world xy estimate
  double yaw = 0.0;
  double pitch = 0.0;
  double forward_velocity = 0.0;  // body x velocity estimate
  double pitch_rate = 0.0;
};

struct RollingControlSetpoint {
  Eigen::Vector2d goal{0.0, 0.0};  // world xy
  double feedforward_velocity = 0.0;
  double mass = 1.5;          // kg
  double thrust_norm = 14.7;  // |F|, N
};

struct RollingControlOutput {
  double desired_velocity = 0.0;  // body x
  double desired_accel = 0.0;     // body x
  double desired_pitch = 0.0;     // theta_d
  double moment_pitch = 0.0;      // M_y
  double moment_yaw_x = 0.0;      // yaw moment component rotated into body x
  double moment_yaw_z = 0.0;      // yaw moment component remaining on body z
  bool saturated = false;
};

/// One step of the rolling-mode cascade: position P -> yaw PD -> velocity
/// D+I -> acceleration-to-pitch mixer -> pitch PD+I. Integrators are frozen
/// while the mixer is saturated and clamped to the configured bound.
RollingControlOutput rolling_control_step(const RollingControlInput& input,
                                          const RollingControlSetpoint& setpoint,
                                          const ControllerGains& gains,
                                          ControllerState& state, double dt);

/// Fraction of maximum thrust needed to hover: m g / T_max.
double thrust_rating(double mass, double gravity, double max_thrust);

struct HoverSample {
  double t = 0.0;
  double thrust_fraction = 0.0;
  double altitude = 0.0;
};

/// Mean thrust fraction over the longest steady-altitude window of the log
/// (|dz/dt| below `climb_eps`). No steady window -> nullopt.
std::optional<double> extract_hover_rating(const std::vector<HoverSample>& log,
                                           double climb_eps = 0.01,
                                           double min_window = 1.0);

/// Text ingestion: one "t thrust_fraction altitude" line per sample,
/// '#' comments allowed.
std::vector<HoverSample> read_hover_log(std::istream& is);

/// Continuous-time Kalman filter state: dx = A x + B u + B_w w, y = C x.
struct EkfSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd Bw;
  Eigen::MatrixXd C;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  Eigen::VectorXd x_hat;
  Eigen::MatrixXd X;  // estimate covariance
};

/// Integrate the estimator and Riccati equations over dt with RK4:
/// dX = A X + X A' + Bw Q Bw' - X C' R^-1 C X, gain L = X C' R^-1
/// recomputed at each stage. The covariance is re-symmetrized and its
/// eigenvalues floored at zero after the step.
void ekf_step(EkfSystem& sys, const Eigen::VectorXd& u, const Eigen::VectorXd& y,
              double dt);

struct StepMetrics {
  double overshoot_percent = 0.0;
  double settling_time = 0.0;  // +inf when the trace never settles
  int oscillation_count = 0;   // crossings of the setpoint
};

/// Standard step-response metrics with a 2% settling band around the step.
StepMetrics step_response_metrics(const std::vector<std::pair<double, double>>& trace,
                                  double setpoint);

}  // namespace hybridnav
