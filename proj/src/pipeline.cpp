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

#include "glovelearn/pipeline.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "glovelearn/bounded_queue.hpp"
#include "glovelearn/errors.hpp"
#include "glovelearn/text_io.hpp"

namespace glovelearn {

namespace {

void check_rates(double duration, double stream_rate, double control_rate) {
  if (!(duration > 0.0)) throw InvalidArgument("duration must be > 0");
  if (!(stream_rate > 0.0)) throw InvalidArgument("stream rate must be > 0");
  if (!(control_rate > 0.0)) throw InvalidArgument("control rate must be > 0");
}

// Reader stage of the record pipeline: pulls chunks off the transport into
// a bounded queue until end of stream or until the consumer closes it.
class ChunkReader {
 public:
  ChunkReader(ByteSource& source, std::size_t capacity)
      : queue_(capacity), thread_([this, &source] { run(source); }) {}

  ~ChunkReader() { stop(); }

  std::optional<std::vector<std::uint8_t>> next() { return queue_.pop(); }

  /// Closes the queue and joins; rethrows a reader failure as TransportError.
  void stop() {
    queue_.close();
    if (thread_.joinable()) thread_.join();
  }

  void rethrow_failure() {
    if (failure_) std::rethrow_exception(failure_);
  }

 private:
  void run(ByteSource& source) {
    try {
      std::array<std::uint8_t, 4096> buf{};
      while (const std::size_t n = source.read(buf)) {
        if (!queue_.push(std::vector<std::uint8_t>(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n)))) {
          break;
        }
      }
    } catch (...) {
      failure_ = std::current_exception();
    }
    queue_.close();
  }

  BoundedQueue<std::vector<std::uint8_t>> queue_;
  std::exception_ptr failure_;
  std::thread thread_;
};

// Nearest frame slot for a sync byte at `offset`.
std::uint64_t frame_slot(std::uint64_t offset) { return (offset + kFrameSize / 2) / kFrameSize; }

}  // namespace

RecordReport record(ByteSource& source, const RecordOptions& options) {
  check_rates(options.duration, options.stream_rate, options.control_rate);
  options.calibration.validate();
  const std::uint64_t rows = frame_count(options.duration, options.control_rate);
  if (rows < 2) throw InvalidArgument("recording must span at least 2 control periods");

  RecordReport report;
  report.expected_frames = frame_count(options.duration, options.stream_rate);
  const std::uint64_t needed_bytes = report.expected_frames * kFrameSize;

  std::vector<double> slots;
  std::vector<Eigen::VectorXd> angles;
  StreamParser parser;
  {
    ChunkReader reader(source, options.queue_capacity);
    bool done = false;
    while (!done) {
      auto chunk = reader.next();
      if (!chunk) break;
      for (const auto& decoded : parser.feed_with_offsets(*chunk)) {
        std::uint64_t slot = frame_slot(decoded.stream_offset);
        if (!slots.empty() && double(slot) <= slots.back()) slot = static_cast<std::uint64_t>(slots.back()) + 1;
        if (slot >= report.expected_frames) {
          done = true;
          break;
        }
        slots.push_back(double(slot));
        angles.push_back(options.coupling.apply(raw_to_angle(options.calibration, decoded.frame)));
      }
      if (parser.bytes_seen() >= needed_bytes + kFrameSize) done = true;
    }
    reader.stop();
    try {
      reader.rethrow_failure();
    } catch (const TransportError&) {
      throw;
    } catch (const std::exception& e) {
      throw TransportError(std::string("transport read failed: ") + e.what());
    }
  }

  report.frames_received = slots.size();
  report.bytes_received = parser.bytes_seen();
  report.bytes_skipped = parser.bytes_skipped();
  if (slots.empty()) throw TransportError("no valid sensor frames received");

  const auto dims = static_cast<Eigen::Index>(options.coupling.outputs());
  Eigen::MatrixXd samples(static_cast<Eigen::Index>(angles.size()), dims);
  for (std::size_t i = 0; i < angles.size(); ++i) samples.row(static_cast<Eigen::Index>(i)) = angles[i].transpose();

  std::vector<double> query(rows);
  for (std::uint64_t j = 0; j < rows; ++j) query[j] = double(j) * options.stream_rate / options.control_rate;

  report.demo.demo.values = interpolate_at(slots, samples, query);
  report.demo.demo.dt = 1.0 / options.control_rate;
  report.demo.labels = options.coupling.labels();
  report.demo.partial = report.bytes_received < needed_bytes;
  return report;
}

CalibrationProfile calibrate(ByteSource& source, double duration, double stream_rate, double joint_min,
                             double joint_max) {
  check_rates(duration, stream_rate, stream_rate);
  const std::uint64_t expected = frame_count(duration, stream_rate);
  ExtremaBuilder builder;
  StreamParser parser;
  std::array<std::uint8_t, 4096> buf{};
  while (builder.frames_observed() < expected) {
    const std::size_t n = source.read(buf);
    if (n == 0) break;
    for (const auto& frame : parser.feed(std::span(buf.data(), n))) {
      if (builder.frames_observed() >= expected) break;
      builder.observe(frame);
    }
  }
  return builder.finalize(joint_min, joint_max);
}

FeedbackReport feedback_loop(const ForceFeedbackMap& map, std::span<const TactileSample> samples, ByteSink& sink,
                             Pacing pacing) {
  map.validate();
  FeedbackReport report;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& sample : samples) {
    if (pacing == Pacing::kRealTime) {
      const double offset = sample.time - samples.front().time;
      std::this_thread::sleep_until(start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                std::chrono::duration<double>(offset)));
    }
    const PwmCommand cmd = tactile_to_pwm(map, sample.force);
    const std::string line = encode_pwm_command(cmd);
    if (!sink.write(std::span(reinterpret_cast<const std::uint8_t*>(line.data()), line.size()))) {
      report.transport_closed = true;
      break;
    }
    report.sent.push_back(cmd);
  }
  return report;
}

TrainReport train(std::span<const DemoFile> demos, const TrainOptions& options) {
  if (demos.empty()) throw UsageError("train needs at least one demonstration");
  const auto& first = demos.front();
  std::vector<Demonstration> data;
  data.reserve(demos.size());
  TrainReport report;
  for (std::size_t i = 0; i < demos.size(); ++i) {
    const auto& d = demos[i];
    if (d.demo.dims() != first.demo.dims()) {
      throw ShapeMismatch("demo " + std::to_string(i + 1) + " has " + std::to_string(d.demo.dims()) +
                          " joints, demo 1 has " + std::to_string(first.demo.dims()));
    }
    if (std::abs(d.demo.dt - first.demo.dt) > 1e-12 * first.demo.dt) {
      throw ShapeMismatch("demo " + std::to_string(i + 1) + " has dt " + format_double(d.demo.dt) +
                          ", demo 1 has " + format_double(first.demo.dt));
    }
    if (d.partial) report.warnings.push_back("demo " + std::to_string(i + 1) + " is flagged partial");
    data.push_back(d.demo);
  }
  if (demos.size() == 1) {
    report.warnings.push_back("single demonstration: weight covariance is eps_reg * I");
  }

  report.model = train_model(data, options, &report.weights);
  report.model.labels = first.labels;

  const Eigen::Index dims = first.demo.dims();
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(dims);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Eigen::MatrixXd residual =
        data[i].values - basis_matrix(data[i].samples(), options.basis) * report.weights[i].w;
    sum_sq += residual.colwise().squaredNorm().transpose();
    total += double(data[i].samples());
  }
  report.residual_rms = (sum_sq / total).cwiseSqrt();
  return report;
}

std::vector<std::string> model_labels(const TrajectoryModel& model) {
  if (static_cast<Eigen::Index>(model.labels.size()) == model.dims) return model.labels;
  std::vector<std::string> labels;
  for (Eigen::Index d = 0; d < model.dims; ++d) labels.push_back("joint" + std::to_string(d + 1));
  return labels;
}

void print_train_summary(std::ostream& out, const TrainReport& report, std::size_t num_demos) {
  const auto& model = report.model;
  out << "K " << model.basis.num_basis << "  D " << model.dims << "  N " << num_demos << "  weights "
      << model.basis.num_basis * model.dims << '\n';
  const auto labels = model_labels(model);
  for (Eigen::Index d = 0; d < model.dims; ++d) {
    out << "  " << labels[d] << "  residual_rms " << format_double(report.residual_rms[d]) << "  sigma_y "
        << format_double(model.noise_var[d]) << '\n';
  }
  for (const auto& warning : report.warnings) out << "warning: " << warning << '\n';
}

TrackingResult reproduce(const TrajectoryModel& model, const ReproduceOptions& options) {
  check_rates(options.duration, options.control_rate, options.control_rate);
  const auto dims = static_cast<std::size_t>(model.dims);
  std::vector<Gains> gains;
  if (options.gains.empty()) {
    gains.assign(dims, Gains{});
  } else if (options.gains.size() == 1) {
    gains.assign(dims, options.gains.front());
  } else if (options.gains.size() == dims) {
    gains = options.gains;
  } else {
    throw ShapeMismatch("model has " + std::to_string(dims) + " joints but " + std::to_string(options.gains.size()) +
                        " gain pairs were given");
  }
  const std::uint64_t samples = frame_count(options.duration, options.control_rate);
  if (samples < 2) throw InvalidArgument("reproduction must span at least 2 control periods");
  return simulate_tracking(mean_trajectory(model, static_cast<Eigen::Index>(samples)), gains, options.plant,
                           options.control_rate);
}

void write_tracking_summary(std::ostream& out, const TrackingResult& result, const std::vector<std::string>& labels) {
  out << "joint,rmse,max_abs_error\n";
  for (Eigen::Index d = 0; d < result.rmse.size(); ++d) {
    const std::string label = static_cast<std::size_t>(d) < labels.size() ? labels[d] : "joint" + std::to_string(d + 1);
    out << label << ',' << format_double(result.rmse[d]) << ',' << format_double(result.max_abs_error[d]) << '\n';
  }
}

EvalReport evaluate(const TrajectoryModel& model, std::span<const DemoFile> demos, double band) {
  if (demos.empty()) throw UsageError("eval needs at least one demonstration");
  const auto n = static_cast<Eigen::Index>(demos.size());
  EvalReport report;
  report.band = band;
  report.labels = model_labels(model);
  report.log_likelihood.resize(model.dims, n);
  report.coverage.resize(model.dims, n);
  report.total_log_likelihood.resize(n);

  double inside_total = 0.0;
  double samples_total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Demonstration& demo = demos[i].demo;
    if (demo.dims() != model.dims) {
      throw InvalidArgument("demo " + std::to_string(i + 1) + " has " + std::to_string(demo.dims()) +
                            " joints, model has " + std::to_string(model.dims));
    }
    report.log_likelihood.col(i) = log_likelihood_per_joint(model, demo);
    report.total_log_likelihood[i] = report.log_likelihood.col(i).sum();

    const Eigen::MatrixXd mean = mean_trajectory(model, demo.samples());
    const Eigen::MatrixXd std = marginal_std(model, demo.samples());
    const auto inside = ((demo.values - mean).cwiseAbs().array() <= band * std.array()).cast<double>();
    report.coverage.col(i) = inside.colwise().sum().transpose() / double(demo.samples());
    inside_total += inside.sum();
    samples_total += double(demo.values.size());
  }
  report.overall_coverage = inside_total / samples_total;
  return report;
}

void write_eval_report(std::ostream& out, const EvalReport& report) {
  const Eigen::Index n = report.log_likelihood.cols();
  out << "joint";
  for (Eigen::Index i = 0; i < n; ++i) out << ",loglik_demo" << (i + 1);
  for (Eigen::Index i = 0; i < n; ++i) out << ",coverage_demo" << (i + 1);
  out << '\n';
  for (Eigen::Index d = 0; d < report.log_likelihood.rows(); ++d) {
    out << report.labels[d];
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(report.log_likelihood(d, i));
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(report.coverage(d, i));
    out << '\n';
  }
  out << "total";
  for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(report.total_log_likelihood[i]);
  out << "\noverall_coverage(+-" << format_double(report.band) << " std)," << format_double(report.overall_coverage)
      << '\n';
}

void write_eval_csv(std::ostream& out, const TrajectoryModel& model, std::span<const DemoFile> demos) {
  if (demos.empty()) throw UsageError("eval needs at least one demonstration");
  const Eigen::Index samples = demos.front().demo.samples();
  for (const auto& d : demos) {
    if (d.demo.samples() != samples) throw ShapeMismatch("plot CSV needs demos of equal length");
    if (d.demo.dims() != model.dims) throw InvalidArgument("demo/model joint count mismatch");
  }
  const Eigen::MatrixXd mean = mean_trajectory(model, samples);
  const Eigen::MatrixXd std = marginal_std(model, samples);
  const auto labels = model_labels(model);
  const double dt = demos.front().demo.dt;

  out << "time";
  for (const auto& label : labels) {
    out << ',' << label << "_mean," << label << "_std";
    for (std::size_t i = 0; i < demos.size(); ++i) out << ',' << label << "_demo" << (i + 1);
  }
  out << '\n';
  for (Eigen::Index t = 0; t < samples; ++t) {
    out << format_double(double(t) * dt);
    for (Eigen::Index d = 0; d < model.dims; ++d) {
      out << ',' << format_double(mean(t, d)) << ',' << format_double(std(t, d));
      for (const auto& demo : demos) out << ',' << format_double(demo.demo.values(t, d));
    }
    out << '\n';
  }
}

}  // namespace glovelearn
