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

#include "glovelearn/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "glovelearn/errors.hpp"
#include "glovelearn/text_io.hpp"

namespace glovelearn {

void CalibrationProfile::validate() const {
  for (std::size_t i = 0; i < kNumChannels; ++i) {
    const auto& c = channels[i];
    if (!(c.raw_min < c.raw_max)) {
      throw InvalidArgument("calibration channel " + std::to_string(i + 1) + ": raw_min must be < raw_max");
    }
    if (!(c.joint_min <= c.joint_max)) {
      throw InvalidArgument("calibration channel " + std::to_string(i + 1) +
                            ": joint_min must be <= joint_max");
    }
  }
}

void ExtremaBuilder::observe(const SensorFrame& frame) {
  for (std::size_t i = 0; i < kNumChannels; ++i) {
    const std::uint16_t v = frame.channels[i];
    if (frames_ == 0 || v < min_[i]) min_[i] = v;
    if (frames_ == 0 || v > max_[i]) max_[i] = v;
  }
  ++frames_;
}

bool ExtremaBuilder::complete() const {
  if (frames_ == 0) return false;
  for (std::size_t i = 0; i < kNumChannels; ++i) {
    if (min_[i] >= max_[i]) return false;
  }
  return true;
}

CalibrationProfile ExtremaBuilder::finalize(double joint_min, double joint_max) const {
  if (frames_ == 0) throw IncompleteCalibration("no frames observed");
  CalibrationProfile profile;
  for (std::size_t i = 0; i < kNumChannels; ++i) {
    if (min_[i] >= max_[i]) {
      throw IncompleteCalibration("channel " + std::to_string(i + 1) + " never moved (min = max = " +
                                  std::to_string(min_[i]) + ")");
    }
    profile.channels[i] = {double(min_[i]), double(max_[i]), joint_min, joint_max};
  }
  profile.validate();
  return profile;
}

GloveAngles raw_to_angle(const CalibrationProfile& profile, const SensorFrame& frame) {
  GloveAngles angles{};
  for (std::size_t i = 0; i < kNumChannels; ++i) {
    const auto& c = profile.channels[i];
    const double raw = std::clamp(double(frame.channels[i]), c.raw_min, c.raw_max);
    angles[i] = c.joint_min + (raw - c.raw_min) / (c.raw_max - c.raw_min) * (c.joint_max - c.joint_min);
  }
  return angles;
}

CouplingMap::CouplingMap(std::vector<std::string> labels, Eigen::MatrixXd weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  if (weights_.cols() != static_cast<Eigen::Index>(kNumChannels)) {
    throw ShapeMismatch("coupling map needs 5 columns, got " + std::to_string(weights_.cols()));
  }
  if (weights_.rows() == 0 || labels_.size() != static_cast<std::size_t>(weights_.rows())) {
    throw ShapeMismatch("coupling map needs one label per output row");
  }
  for (Eigen::Index r = 0; r < weights_.rows(); ++r) {
    if ((weights_.row(r).array() < 0.0).any()) {
      throw InvalidArgument("coupling weights must be >= 0 (row '" + labels_[r] + "')");
    }
    if (std::abs(weights_.row(r).sum() - 1.0) > 1e-9) {
      throw InvalidArgument("coupling weights must sum to 1 (row '" + labels_[r] + "')");
    }
  }
}

CouplingMap CouplingMap::identity() {
  return CouplingMap({"thumb", "index", "middle", "ring", "little"},
                     Eigen::MatrixXd::Identity(kNumChannels, kNumChannels));
}

CouplingMap CouplingMap::default_hand() {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, kNumChannels);
  w(0, 0) = 1.0;
  w(1, 1) = 1.0;
  w(2, 2) = 1.0;
  w(3, 3) = 0.5;
  w(3, 4) = 0.5;
  return CouplingMap({"thumb", "index", "middle", "ring_little"}, std::move(w));
}

CouplingMap CouplingMap::hand13() {
  std::vector<std::string> labels = {
      "thumb_oppose", "thumb_proximal", "thumb_distal",  "index_proximal", "index_middle",
      "index_distal", "middle_proximal", "middle_middle", "middle_distal",  "ring_little_proximal",
      "ring_little_middle", "ring_little_distal", "hand_aperture"};
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(13, kNumChannels);
  for (int j = 0; j < 3; ++j) {
    w(j, 0) = 1.0;
    w(3 + j, 1) = 1.0;
    w(6 + j, 2) = 1.0;
    w(9 + j, 3) = 0.5;
    w(9 + j, 4) = 0.5;
  }
  w.row(12).setConstant(0.2);
  return CouplingMap(std::move(labels), std::move(w));
}

Eigen::VectorXd CouplingMap::apply(const Eigen::VectorXd& glove_angles) const {
  if (glove_angles.size() != weights_.cols()) {
    throw ShapeMismatch("coupling map expects " + std::to_string(weights_.cols()) + " inputs, got " +
                        std::to_string(glove_angles.size()));
  }
  return weights_ * glove_angles;
}

Eigen::VectorXd CouplingMap::apply(const GloveAngles& glove_angles) const {
  return apply(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(glove_angles.data(), kNumChannels)));
}

void ForceFeedbackMap::validate() const {
  if (!(f_max > 0.0) || !std::isfinite(f_max)) throw InvalidArgument("f_max must be > 0");
  for (const double s : scale) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("force feedback scale must be >= 0");
  }
}

std::uint8_t tactile_to_pwm(const ForceFeedbackMap& map, double force, std::size_t finger) {
  const double scaled = 255.0 * map.scale.at(finger) * force / map.f_max;
  if (!(scaled > 0.0)) return 0;  // also catches NaN
  return static_cast<std::uint8_t>(std::min(std::round(scaled), 255.0));
}

PwmCommand tactile_to_pwm(const ForceFeedbackMap& map, const std::array<double, kNumChannels>& forces) {
  PwmCommand cmd;
  for (std::size_t i = 0; i < kNumChannels; ++i) cmd.duty[i] = tactile_to_pwm(map, forces[i], i);
  return cmd;
}

void write_calibration(std::ostream& out, const CalibrationProfile& profile) {
  out << "calib-v1\n";
  for (std::size_t i = 0; i < kNumChannels; ++i) {
    const auto& c = profile.channels[i];
    out << (i + 1) << ' ' << format_double(c.raw_min) << ' ' << format_double(c.raw_max) << ' '
        << format_double(c.joint_min) << ' ' << format_double(c.joint_max) << '\n';
  }
}

CalibrationProfile read_calibration(std::istream& in) {
  expect_header(in, "calib-v1");
  CalibrationProfile profile;
  std::array<bool, kNumChannels> seen{};
  std::string line;
  while (next_line(in, line)) {
    const auto fields = split_whitespace(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    if (fields.size() != 5) throw ParseError("calib-v1: expected 5 fields, got '" + line + "'");
    const long long ch = parse_integer(fields[0], "calibration channel");
    if (ch < 1 || ch > static_cast<long long>(kNumChannels)) {
      throw ParseError("calib-v1: channel out of range in '" + line + "'");
    }
    auto& c = profile.channels[ch - 1];
    c.raw_min = parse_double(fields[1], "raw_min");
    c.raw_max = parse_double(fields[2], "raw_max");
    c.joint_min = parse_double(fields[3], "joint_min");
    c.joint_max = parse_double(fields[4], "joint_max");
    seen[ch - 1] = true;
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw ParseError("calib-v1: all 5 channels must be present");
  }
  try {
    profile.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("calib-v1: ") + e.what());
  }
  return profile;
}

void write_coupling(std::ostream& out, const CouplingMap& map) {
  out << "coupling-v1\n";
  for (std::size_t r = 0; r < map.outputs(); ++r) {
    out << map.labels()[r];
    for (Eigen::Index c = 0; c < map.weights().cols(); ++c) {
      out << ' ' << format_double(map.weights()(static_cast<Eigen::Index>(r), c));
    }
    out << '\n';
  }
}

CouplingMap read_coupling(std::istream& in) {
  expect_header(in, "coupling-v1");
  std::vector<std::string> labels;
  std::vector<std::array<double, kNumChannels>> rows;
  std::string line;
  while (next_line(in, line)) {
    const auto fields = split_whitespace(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    if (fields.size() != kNumChannels + 1) {
      throw ParseError("coupling-v1: expected a label and 5 weights, got '" + line + "'");
    }
    labels.emplace_back(fields[0]);
    auto& row = rows.emplace_back();
    for (std::size_t c = 0; c < kNumChannels; ++c) row[c] = parse_double(fields[c + 1], "coupling weight");
  }
  Eigen::MatrixXd w(static_cast<Eigen::Index>(rows.size()), kNumChannels);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < kNumChannels; ++c) w(static_cast<Eigen::Index>(r), c) = rows[r][c];
  }
  try {
    return CouplingMap(std::move(labels), std::move(w));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("coupling-v1: ") + e.what());
  } catch (const ShapeMismatch& e) {
    throw ParseError(std::string("coupling-v1: ") + e.what());
  }
}

}  // namespace glovelearn
