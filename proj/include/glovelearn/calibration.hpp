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

#include <array>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glovelearn/wire_protocol.hpp"

namespace glovelearn {

using GloveAngles = std::array<double, kNumChannels>;

struct ChannelCalibration {
  double raw_min = 0.0;
  double raw_max = kMaxRawReading;
  double joint_min = 0.0;               // rad
  double joint_max = std::numbers::pi / 2;  // rad
};

struct CalibrationProfile {
  std::array<ChannelCalibration, kNumChannels> channels{};

  /// Throws InvalidArgument unless raw_min < raw_max and joint_min <= joint_max on every channel.
  void validate() const;
};

/// Running per-channel extrema of the frames seen so far.
class ExtremaBuilder {
 public:
  void observe(const SensorFrame& frame);
  bool complete() const;
  std::uint64_t frames_observed() const { return frames_; }

  /// Throws IncompleteCalibration if any channel has min == max (or nothing was observed).
  CalibrationProfile finalize(double joint_min = 0.0, double joint_max = std::numbers::pi / 2) const;

 private:
  std::array<std::uint16_t, kNumChannels> min_{};
  std::array<std::uint16_t, kNumChannels> max_{};
  std::uint64_t frames_ = 0;
};

/// Linear map, clamped to the captured raw range.
GloveAngles raw_to_angle(const CalibrationProfile& profile, const SensorFrame& frame);

/// Mixes the five glove angles into robot joint angles: out = W * in, with
/// each row of W non-negative and summing to one.
class CouplingMap {
 public:
  CouplingMap(std::vector<std::string> labels, Eigen::MatrixXd weights);

  /// thumb, index, middle pass through; ring and little drive one coupled joint at 0.5/0.5.
  static CouplingMap default_hand();
  static CouplingMap identity();
  /// 13 robot joints: three per thumb/index/middle, three coupled ring-little
  /// joints and a hand-aperture joint averaging all five channels.
  static CouplingMap hand13();

  Eigen::VectorXd apply(const Eigen::VectorXd& glove_angles) const;
  Eigen::VectorXd apply(const GloveAngles& glove_angles) const;

  std::size_t outputs() const { return static_cast<std::size_t>(weights_.rows()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::MatrixXd& weights() const { return weights_; }

 private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd weights_;
};

struct ForceFeedbackMap {
  double f_max = 1.0;  // tactile full scale, sensor units
  std::array<double, kNumChannels> scale{1.0, 1.0, 1.0, 1.0, 1.0};

  void validate() const;
};

/// clamp(round(255 * scale * force / f_max), 0, 255), rounding half away from zero.
std::uint8_t tactile_to_pwm(const ForceFeedbackMap& map, double force, std::size_t finger = 0);
PwmCommand tactile_to_pwm(const ForceFeedbackMap& map, const std::array<double, kNumChannels>& forces);

// calib-v1:
//   calib-v1
//   <channel> <raw_min> <raw_max> <joint_min> <joint_max>     (x5, channel 1..5)
void write_calibration(std::ostream& out, const CalibrationProfile& profile);
CalibrationProfile read_calibration(std::istream& in);

// coupling-v1:
//   coupling-v1
//   <label> <w1> <w2> <w3> <w4> <w5>                          (one line per robot joint)
void write_coupling(std::ostream& out, const CouplingMap& map);
CouplingMap read_coupling(std::istream& in);

}  // namespace glovelearn
