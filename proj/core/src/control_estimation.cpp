#include "hybridnav/control_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hybridnav {

RollingControlOutput rolling_control_step(const RollingControlInput& input,
                                          const RollingControlSetpoint& setpoint,
                                          const ControllerGains& gains,
                                          ControllerState& state, double dt) {
  RollingControlOutput out;

  // Position: world error rotated into the body frame, P gain on forward.
  const Eigen::Vector2d e_world = setpoint.goal - input.position;
  const double cy = std::cos(input.yaw), sy = std::sin(input.yaw);
  const Eigen::Vector2d e_body(cy * e_world.x() + sy * e_world.y(),
                               -sy * e_world.x() + cy * e_world.y());
  out.desired_velocity = gains.pos_kp * e_body.x();

  // Yaw: PD on the S1 heading error toward the goal direction.
  double yaw_error = 0.0;
  if (e_world.norm() > 1e-12) {
    const double yaw_desired = std::atan2(e_world.y(), e_world.x());
    yaw_error = s1_distance(yaw_desired, input.yaw);
  }
  const double yaw_error_rate =
      state.has_prev_yaw_error && dt > 0.0 ? (yaw_error - state.prev_yaw_error) / dt : 0.0;
  const double moment_yaw_world = gains.yaw_kp * yaw_error + gains.yaw_kd * yaw_error_rate;
  state.prev_yaw_error = yaw_error;
  state.has_prev_yaw_error = true;

  // Velocity: D on the velocity error plus the chi1 integral term.
  const double vel_error =
      (out.desired_velocity + setpoint.feedforward_velocity) - input.forward_velocity;
  out.desired_accel = gains.vel_kd * vel_error + gains.vel_ki * state.chi1;

  // Mixer: desired pitch from the forward acceleration share of the thrust.
  const double mf = setpoint.mass * setpoint.thrust_norm;
  const double ratio = mf > 0.0 ? out.desired_accel / mf : 0.0;
  out.saturated = std::abs(ratio) > 1.0;
  out.desired_pitch = std::asin(std::clamp(ratio, -1.0, 1.0));
  out.moment_yaw_x = std::sin(input.pitch) * moment_yaw_world;
  out.moment_yaw_z = std::cos(input.pitch) * moment_yaw_world;

  // Pitch: PD+I on the pitch error.
  const double pitch_error = s1_distance(out.desired_pitch, input.pitch);
  out.moment_pitch = gains.pitch_kp * pitch_error + gains.pitch_kd * (-input.pitch_rate) +
                     gains.pitch_ki * state.chi2;

  // Conditional integration: hold both integrators while saturated.
  if (!out.saturated) {
    state.chi1 = std::clamp(state.chi1 + vel_error * dt, -state.integrator_clamp,
                            state.integrator_clamp);
    state.chi2 = std::clamp(state.chi2 + pitch_error * dt, -state.integrator_clamp,
                            state.integrator_clamp);
  }
  return out;
}

double thrust_rating(double mass, double gravity, double max_thrust) {
  if (max_thrust <= 0.0) throw std::invalid_argument("thrust_rating: max_thrust > 0");
  return mass * gravity / max_thrust;
}

std::optional<double> extract_hover_rating(const std::vector<HoverSample>& log,
                                           double climb_eps, double min_window) {
  if (log.size() < 2) return std::nullopt;

  std::size_t best_begin = 0, best_end = 0;  // [begin, end] sample range
  double best_span = 0.0;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= log.size(); ++i) {
    bool steady = false;
    if (i < log.size()) {
      const double dt = log[i].t - log[i - 1].t;
      steady = dt > 0.0 && std::abs(log[i].altitude - log[i - 1].altitude) / dt < climb_eps;
    }
    if (!steady) {
      const double span = log[i - 1].t - log[begin].t;
      if (i - 1 > begin && span > best_span) {
        best_span = span;
        best_begin = begin;
        best_end = i - 1;
      }
      begin = i;
    }
  }
  if (best_span < min_window) return std::nullopt;

  double sum = 0.0;
  for (std::size_t i = best_begin; i <= best_end; ++i) sum += log[i].thrust_fraction;
  return sum / static_cast<double>(best_end - best_begin + 1);
}

std::vector<HoverSample> read_hover_log(std::istream& is) {
  std::vector<HoverSample> log;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    HoverSample s;
    if (ls >> s.t >> s.thrust_fraction >> s.altitude) log.push_back(s);
  }
  return log;
}

namespace {

struct EkfDerivative {
  Eigen::VectorXd dx_hat;
  Eigen::MatrixXd dX;
};

EkfDerivative ekf_derivative(const EkfSystem& sys, const Eigen::VectorXd& x_hat,
                             const Eigen::MatrixXd& X, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& y, const Eigen::MatrixXd& r_inv) {
  EkfDerivative d;
  const Eigen::MatrixXd L = X * sys.C.transpose() * r_inv;
  d.dx_hat = sys.A * x_hat + sys.B * u + L * (y - sys.C * x_hat);
  d.dX = sys.A * X + X * sys.A.transpose() + sys.Bw * sys.Q * sys.Bw.transpose() -
         X * sys.C.transpose() * r_inv * sys.C * X;
  return d;
}

}  // namespace

void ekf_step(EkfSystem& sys, const Eigen::VectorXd& u, const Eigen::VectorXd& y,
              double dt) {
  if (dt <= 0.0) throw std::invalid_argument("ekf_step: dt must be > 0");
  const Eigen::MatrixXd r_inv = sys.R.inverse();
  if (!r_inv.allFinite()) throw std::invalid_argument("ekf_step: R must be invertible");

  const auto k1 = ekf_derivative(sys, sys.x_hat, sys.X, u, y, r_inv);
  const auto k2 = ekf_derivative(sys, sys.x_hat + 0.5 * dt * k1.dx_hat,
                                 sys.X + 0.5 * dt * k1.dX, u, y, r_inv);
  const auto k3 = ekf_derivative(sys, sys.x_hat + 0.5 * dt * k2.dx_hat,
                                 sys.X + 0.5 * dt * k2.dX, u, y, r_inv);
  const auto k4 =
      ekf_derivative(sys, sys.x_hat + dt * k3.dx_hat, sys.X + dt * k3.dX, u, y, r_inv);

  sys.x_hat += dt / 6.0 * (k1.dx_hat + 2.0 * k2.dx_hat + 2.0 * k3.dx_hat + k4.dx_hat);
  sys.X += dt / 6.0 * (k1.dX + 2.0 * k2.dX + 2.0 * k3.dX + k4.dX);

  // Keep the covariance symmetric PSD.
  sys.X = 0.5 * (sys.X + sys.X.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.X);
  if (es.info() == Eigen::Success && es.eigenvalues().minCoeff() < 0.0) {
    const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
    sys.X = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
  }
}

StepMetrics step_response_metrics(const std::vector<std::pair<double, double>>& trace,
                                  double setpoint) {
  if (trace.empty()) throw std::invalid_argument("step_response_metrics: empty trace");

  StepMetrics m;
  const double initial = trace.front().second;
  const double step = setpoint - initial;
  const double step_mag = std::abs(step) > 1e-12 ? std::abs(step) : 1.0;
  const double band = 0.02 * step_mag;

  double peak_beyond = 0.0;
  for (const auto& [t, v] : trace) {
    const double along = (v - initial) * (step >= 0 ? 1.0 : -1.0);
    peak_beyond = std::max(peak_beyond, along - std::abs(step));
  }
  m.overshoot_percent = 100.0 * peak_beyond / step_mag;

  m.settling_time = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    bool settled = true;
    for (std::size_t j = i; j < trace.size(); ++j) {
      if (std::abs(trace[j].second - setpoint) > band) {
        settled = false;
        break;
      }
    }
    if (settled) {
      m.settling_time = trace[i].first - trace.front().first;
      break;
    }
  }

  int prev_sign = 0;
  for (const auto& [t, v] : trace) {
    const double e = v - setpoint;
    const int sign = e > 0 ? 1 : (e < 0 ? -1 : 0);
    if (sign != 0 && prev_sign != 0 && sign != prev_sign) ++m.oscillation_count;
    if (sign != 0) prev_sign = sign;
  }
  return m;
}

}  // namespace hybridnav
