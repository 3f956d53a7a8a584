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

#include "glovelearn/control_sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "glovelearn/errors.hpp"
#include "glovelearn/text_io.hpp"

namespace glovelearn {

void Gains::validate() const {
  if (!(kp > 0.0) || !std::isfinite(kp)) throw InvalidArgument("Kp must be > 0");
  if (!(kd >= 0.0) || !std::isfinite(kd)) throw InvalidArgument("Kd must be >= 0");
}

void PlantParams::validate() const {
  if (!(inertia > 0.0)) throw InvalidArgument("plant inertia must be > 0");
  if (!(damping >= 0.0)) throw InvalidArgument("plant damping must be >= 0");
  if (!(torque_limit > 0.0)) throw InvalidArgument("torque limit must be > 0");
}

double pd_torque(const Gains& gains, double q_des, double qd_des, const JointState& state, double torque_limit) {
  const double tau = gains.kp * (q_des - state.position) + gains.kd * (qd_des - state.velocity);
  return std::clamp(tau, -torque_limit, torque_limit);
}

JointState step_plant(const JointState& state, const PlantParams& plant, double torque, double dt) {
  JointState next;
  next.velocity = state.velocity + dt * (torque - plant.damping * state.velocity) / plant.inertia;
  next.position = state.position + dt * next.velocity;
  return next;
}

TrackingResult simulate_tracking(const Eigen::MatrixXd& reference, std::span<const Gains> gains,
                                 const PlantParams& plant, double rate) {
  if (reference.rows() < 1 || reference.cols() < 1) throw InvalidArgument("empty reference trajectory");
  if (!reference.allFinite()) throw InvalidArgument("reference trajectory has non-finite entries");
  if (static_cast<Eigen::Index>(gains.size()) != reference.cols()) {
    throw InvalidArgument("need one gain pair per joint: " + std::to_string(gains.size()) + " vs " +
                          std::to_string(reference.cols()));
  }
  if (!(rate > 0.0)) throw InvalidArgument("control rate must be > 0");
  for (const auto& g : gains) g.validate();
  plant.validate();

  const double dt = 1.0 / rate;
  const Eigen::Index steps = reference.rows();
  TrackingResult result;
  result.rate = rate;
  result.reference = reference;
  result.executed.resize(steps, reference.cols());

  for (Eigen::Index d = 0; d < reference.cols(); ++d) {
    JointState state{reference(0, d), 0.0};
    result.executed(0, d) = state.position;
    for (Eigen::Index i = 1; i < steps; ++i) {
      const double q_des = reference(i, d);
      const double qd_des = (reference(i, d) - reference(i - 1, d)) * rate;
      const double tau = pd_torque(gains[d], q_des, qd_des, state, plant.torque_limit);
      state = step_plant(state, plant, tau, dt);
      result.executed(i, d) = state.position;
    }
  }

  const Eigen::MatrixXd error = result.executed - reference;
  result.rmse = (error.colwise().squaredNorm() / double(steps)).cwiseSqrt().transpose();
  result.max_abs_error = error.cwiseAbs().colwise().maxCoeff().transpose();
  return result;
}

TrackingResult simulate_tracking(const Eigen::MatrixXd& reference, const Gains& gains,
                                 const PlantParams& plant, double rate) {
  const std::vector<Gains> per_joint(static_cast<std::size_t>(std::max<Eigen::Index>(reference.cols(), 0)), gains);
  return simulate_tracking(reference, per_joint, plant, rate);
}

Eigen::MatrixXd interpolate_at(std::span<const double> times, const Eigen::MatrixXd& values,
                               std::span<const double> query) {
  if (times.empty() || static_cast<Eigen::Index>(times.size()) != values.rows()) {
    throw InvalidArgument("interpolation needs one time stamp per row");
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(query.size()), values.cols());
  std::size_t hi = 1;
  for (std::size_t j = 0; j < query.size(); ++j) {
    const double t = query[j];
    const auto row = static_cast<Eigen::Index>(j);
    if (times.size() == 1 || t <= times.front()) {
      out.row(row) = values.row(0);
      continue;
    }
    if (t >= times.back()) {
      out.row(row) = values.row(values.rows() - 1);
      continue;
    }
    if (hi > 1 && times[hi - 1] > t) hi = 1;  // unsorted query: rescan
    while (times[hi] < t) ++hi;
    const auto lo = static_cast<Eigen::Index>(hi - 1);
    const double frac = (t - times[hi - 1]) / (times[hi] - times[hi - 1]);
    out.row(row) = values.row(lo) + frac * (values.row(lo + 1) - values.row(lo));
  }
  return out;
}

Eigen::MatrixXd resample_linear(const Eigen::MatrixXd& series, double from_rate, double to_rate) {
  if (!(from_rate > 0.0) || !(to_rate > 0.0)) throw InvalidArgument("resampling rates must be > 0");
  if (series.rows() < 2) throw InvalidArgument("resampling needs at least 2 samples");
  const double span = double(series.rows() - 1) * to_rate / from_rate;
  const auto out_rows = static_cast<Eigen::Index>(std::floor(span * (1.0 + 1e-12))) + 1;
  const Eigen::Index last = series.rows() - 1;

  Eigen::MatrixXd out(out_rows, series.cols());
  for (Eigen::Index j = 0; j < out_rows; ++j) {
    // Source position in samples; j / r2 seconds at r1 samples per second.
    const double pos = double(j) * from_rate / to_rate;
    auto lo = static_cast<Eigen::Index>(std::floor(pos));
    if (lo >= last) {
      out.row(j) = series.row(last);
      continue;
    }
    const double frac = pos - double(lo);
    out.row(j) = frac == 0.0 ? Eigen::RowVectorXd(series.row(lo))
                             : Eigen::RowVectorXd(series.row(lo) + frac * (series.row(lo + 1) - series.row(lo)));
  }
  return out;
}

void write_tracking_csv(std::ostream& out, const TrackingResult& result, const std::vector<std::string>& labels) {
  const Eigen::Index dims = result.reference.cols();
  out << "time";
  for (Eigen::Index d = 0; d < dims; ++d) {
    const std::string label = static_cast<std::size_t>(d) < labels.size() ? labels[d] : "joint" + std::to_string(d + 1);
    out << ',' << label << "_ref," << label << "_exec," << label << "_err";
  }
  out << '\n';
  for (Eigen::Index i = 0; i < result.reference.rows(); ++i) {
    out << format_double(double(i) / result.rate);
    for (Eigen::Index d = 0; d < dims; ++d) {
      out << ',' << format_double(result.reference(i, d)) << ',' << format_double(result.executed(i, d)) << ','
          << format_double(result.executed(i, d) - result.reference(i, d));
    }
    out << '\n';
  }
}

}  // namespace glovelearn
