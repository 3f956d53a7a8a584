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

// Demonstration -> model -> reproduction workflow behind the glovectl subcommands.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "glovelearn/calibration.hpp"
#include "glovelearn/control_sim.hpp"
#include "glovelearn/emulator.hpp"
#include "glovelearn/formats.hpp"
#include "glovelearn/trajectory_model.hpp"
#include "glovelearn/transport.hpp"

namespace glovelearn {

struct RecordOptions {
  CalibrationProfile calibration;
  CouplingMap coupling = CouplingMap::default_hand();
  double duration = 15.0;                  // s
  double control_rate = kControlRateHz;    // Hz
  double stream_rate = kStreamRateHz;      // Hz
  std::size_t queue_capacity = 64;         // chunks between reader and decoder
};

struct RecordReport {
  DemoFile demo;
  std::uint64_t expected_frames = 0;
  std::uint64_t frames_received = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t bytes_skipped = 0;
};

/// Reads the sensor stream for `duration`, maps every frame through the
/// calibration and coupling map, and resamples onto the control grid
/// (floor(duration * control_rate) rows).
///
/// A frame's stream time comes from its byte offset (offset / 13 frame
/// slots), so frames lost to corruption leave gaps that are bridged by
/// linear interpolation. If the source ends before duration worth of bytes
/// arrived, the demo is flagged partial. Throws TransportError if no frame
/// was decoded at all.
RecordReport record(ByteSource& source, const RecordOptions& options);

/// Runs raw frames straight into the extrema builder.
CalibrationProfile calibrate(ByteSource& source, double duration, double stream_rate, double joint_min,
                             double joint_max);

struct FeedbackReport {
  std::vector<PwmCommand> sent;
  bool transport_closed = false;
};

/// Maps each tactile sample to a PWM command and writes it as a command line.
/// In real-time mode the sample time stamps pace the writes.
FeedbackReport feedback_loop(const ForceFeedbackMap& map, std::span<const TactileSample> samples, ByteSink& sink,
                             Pacing pacing = Pacing::kFast);

struct TrainReport {
  TrajectoryModel model;
  std::vector<WeightMatrix> weights;
  Eigen::VectorXd residual_rms;  // per joint, pooled over demos
  std::vector<std::string> warnings;
};

/// Throws ShapeMismatch if the demos disagree on D or dt.
TrainReport train(std::span<const DemoFile> demos, const TrainOptions& options);
void print_train_summary(std::ostream& out, const TrainReport& report, std::size_t num_demos);

struct ReproduceOptions {
  double duration = 15.0;
  double control_rate = kControlRateHz;
  /// Empty: defaults for every joint. One entry: shared. Otherwise one per joint.
  std::vector<Gains> gains;
  PlantParams plant;
};

/// Tracks the model mean over floor(duration * control_rate) samples.
/// Throws ShapeMismatch if the gain count matches neither 1 nor D.
TrackingResult reproduce(const TrajectoryModel& model, const ReproduceOptions& options);
void write_tracking_summary(std::ostream& out, const TrackingResult& result, const std::vector<std::string>& labels);

struct EvalReport {
  std::vector<std::string> labels;
  Eigen::MatrixXd log_likelihood;  // D x N
  Eigen::MatrixXd coverage;        // D x N, fraction of samples within the band
  Eigen::VectorXd total_log_likelihood;  // N
  double overall_coverage = 0.0;
  double band = 2.0;
};

/// Throws UsageError on an empty demo list, InvalidArgument on a dimension mismatch.
EvalReport evaluate(const TrajectoryModel& model, std::span<const DemoFile> demos, double band = 2.0);
void write_eval_report(std::ostream& out, const EvalReport& report);
/// Columns: time, then <label>_mean, <label>_std, <label>_demo<n> per joint. All demos must share T.
void write_eval_csv(std::ostream& out, const TrajectoryModel& model, std::span<const DemoFile> demos);

std::vector<std::string> model_labels(const TrajectoryModel& model);

}  // namespace glovelearn
