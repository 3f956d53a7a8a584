// Copyright 2026 The glovelearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Per-joint PD impedance tracking on a decoupled second-order plant
//   m * qdd + b * qd = tau,
// integrated with semi-implicit Euler at the control rate.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace glovelearn {

inline constexpr double kControlRateHz = 200.0;

struct Gains {
  double kp = 5.0;  // N m / rad
  double kd = 0.2;  // N m s / rad

  /// Throws InvalidArgument unless kp > 0 and kd >= 0.
  void validate() const;
};

struct PlantParams {
  double inertia = 0.01;      // kg m^2
  double damping = 0.05;      // N m s / rad
  double torque_limit = 2.0;  // N m

  void validate() const;
};

struct JointState {
  double position = 0.0;  // rad
  double velocity = 0.0;  // rad/s
};

/// clamp(kp * (q_des - q) + kd * (qd_des - qd), -torque_limit, torque_limit).
double pd_torque(const Gains& gains, double q_des, double qd_des, const JointState& state, double torque_limit);

/// qd += dt * (tau - b qd) / m;  q += dt * qd.
JointState step_plant(const JointState& state, const PlantParams& plant, double torque, double dt);

struct TrackingResult {
  Eigen::MatrixXd reference;  // T x D
  Eigen::MatrixXd executed;   // T x D
  Eigen::VectorXd rmse;       // per joint
  Eigen::VectorXd max_abs_error;
  double rate = kControlRateHz;
};

/// Starts every joint at rest on the first reference row. At step i >= 1 the
/// controller targets row i with the backward-difference reference velocity,
/// then the plant advances one period. Throws InvalidArgument on non-finite
/// references, invalid gains or plant, and per-joint gain count mismatches.
TrackingResult simulate_tracking(const Eigen::MatrixXd& reference, std::span<const Gains> gains,
                                 const PlantParams& plant, double rate = kControlRateHz);
TrackingResult simulate_tracking(const Eigen::MatrixXd& reference, const Gains& gains,
                                 const PlantParams& plant, double rate = kControlRateHz);

/// Linear interpolation of a uniformly sampled series from rate r1 to r2:
/// T' = floor((T - 1) r2 / r1) + 1 rows, row j taken at time j / r2.
Eigen::MatrixXd resample_linear(const Eigen::MatrixXd& series, double from_rate, double to_rate);

/// Linear interpolation of samples at strictly increasing `times`, holding
/// the end values outside [times.front(), times.back()].
Eigen::MatrixXd interpolate_at(std::span<const double> times, const Eigen::MatrixXd& values,
                               std::span<const double> query);

/// Columns: time, then <label>_ref, <label>_exec, <label>_err for each joint.
void write_tracking_csv(std::ostream& out, const TrackingResult& result, const std::vector<std::string>& labels);

}  // namespace glovelearn
