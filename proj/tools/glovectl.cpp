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

// glovectl: glove emulation, recording, training and reproduction.
//
// Exit codes: 0 success, 2 usage error, 3 data/shape error, 4 transport failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "glovelearn/calibration.hpp"
#include "glovelearn/emulator.hpp"
#include "glovelearn/errors.hpp"
#include "glovelearn/formats.hpp"
#include "glovelearn/kv_config.hpp"
#include "glovelearn/pipeline.hpp"
#include "glovelearn/text_io.hpp"
#include "glovelearn/transport.hpp"

namespace gl = glovelearn;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitTransport = 4;

gl::EmulatorConfig load_emulator_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw gl::UsageError("cannot read emulator config " + path);
  gl::EmulatorConfig config = gl::read_emulator_config(in);
  if (const char* seed = std::getenv("DEMO_SEED"); seed != nullptr && *seed != '\0') {
    const long long value = gl::parse_integer(seed, "DEMO_SEED");
    if (value < 0) throw gl::UsageError("DEMO_SEED must be >= 0");
    // The config seed stays as a per-stream offset so two demo configs remain distinct.
    config.seed += static_cast<std::uint64_t>(value);
  }
  return config;
}

// A byte source that may be backed by an in-process emulator thread
// ("emulator:CONFIG"), streaming in fast mode into a memory channel.
class SourceHandle {
 public:
  SourceHandle(const std::string& spec, double duration) {
    if (spec.rfind("emulator:", 0) == 0) {
      auto channel = std::make_unique<gl::MemoryChannel>(256);
      auto* sink = channel.get();
      emulator_.emplace(load_emulator_config(spec.substr(9)));
      worker_ = std::thread([this, sink, duration] {
        gl::run_emulator(*emulator_, duration, *sink, gl::Pacing::kFast);
        sink->close();
      });
      channel_ = std::move(channel);
      source_ = channel_.get();
    } else {
      owned_ = gl::open_source(spec);
      source_ = owned_.get();
    }
  }
  ~SourceHandle() {
    if (channel_) channel_->close();
    if (worker_.joinable()) worker_.join();
  }
  gl::ByteSource& source() { return *source_; }

 private:
  std::optional<gl::GloveEmulator> emulator_;
  std::unique_ptr<gl::MemoryChannel> channel_;
  std::unique_ptr<gl::ByteSource> owned_;
  gl::ByteSource* source_ = nullptr;
  std::thread worker_;
};

template <typename T>
T load_with(const std::string& path, T (*reader)(std::istream&)) {
  std::ifstream in(path);
  if (!in) throw gl::ParseError("cannot read " + path);
  return reader(in);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw gl::ParseError("cannot write " + path);
  return out;
}

gl::CouplingMap coupling_preset(const std::string& name) {
  if (name == "hand4") return gl::CouplingMap::default_hand();
  if (name == "hand13") return gl::CouplingMap::hand13();
  if (name == "identity") return gl::CouplingMap::identity();
  throw gl::UsageError("unknown coupling preset '" + name + "' (hand4, hand13, identity)");
}

std::string format_pwm(const gl::PwmCommand& cmd) {
  std::string line = gl::encode_pwm_command(cmd);
  line.pop_back();
  return line;
}

struct EmulateArgs {
  std::string config;
  double duration = 1.0;
  bool fast = false;
  std::string transport = "pipe";
  std::string pwm_in;
};

int run_emulate(const EmulateArgs& args) {
  gl::GloveEmulator emulator(load_emulator_config(args.config));
  auto sink = gl::open_sink(args.transport);

  gl::BoundedQueue<gl::PwmCommand> inbox(1024);
  std::thread pwm_reader;
  std::unique_ptr<gl::ByteSource> pwm_source;
  if (!args.pwm_in.empty()) {
    pwm_source = gl::open_source(args.pwm_in);
    pwm_reader = std::thread([&] {
      gl::PwmInboxSink forward(inbox);
      std::array<std::uint8_t, 512> buf{};
      try {
        while (const std::size_t n = pwm_source->read(buf)) {
          if (!forward.write(std::span(buf.data(), n))) break;
        }
      } catch (const gl::TransportError&) {
      }
    });
  }

  const auto result = gl::run_emulator(emulator, args.duration, *sink,
                                       args.fast ? gl::Pacing::kFast : gl::Pacing::kRealTime,
                                       args.pwm_in.empty() ? nullptr : &inbox);
  sink->close();
  if (pwm_reader.joinable()) {
    pwm_reader.join();
    while (auto cmd = inbox.try_pop()) emulator.handle_pwm(*cmd);
  }
  std::cerr << "frames_written " << result.frames_written << '\n';
  std::cerr << "last_pwm " << format_pwm(emulator.last_pwm()) << '\n';
  if (result.transport_closed) {
    std::cerr << "transport closed after " << result.frames_written << " frames\n";
    return kExitTransport;
  }
  return 0;
}

struct CalibrateArgs {
  std::string transport;
  double duration = 5.0;
  double stream_rate = gl::kStreamRateHz;
  double joint_min = 0.0;
  double joint_max = std::numbers::pi / 2;
  std::string out;
};

int run_calibrate(const CalibrateArgs& args) {
  SourceHandle handle(args.transport, args.duration);
  const auto profile = gl::calibrate(handle.source(), args.duration, args.stream_rate, args.joint_min, args.joint_max);
  auto out = open_output(args.out);
  gl::write_calibration(out, profile);
  for (std::size_t i = 0; i < gl::kNumChannels; ++i) {
    std::cout << "channel " << (i + 1) << "  raw [" << profile.channels[i].raw_min << ", "
              << profile.channels[i].raw_max << "]\n";
  }
  return 0;
}

struct RecordArgs {
  std::string transport;
  std::string calibration;
  std::string coupling;
  std::string coupling_preset = "hand4";
  double duration = 15.0;
  double control_rate = gl::kControlRateHz;
  double stream_rate = gl::kStreamRateHz;
  std::string out;
};

int run_record(const RecordArgs& args) {
  gl::RecordOptions options;
  try {
    options.calibration = load_with(args.calibration, gl::read_calibration);
  } catch (const gl::ParseError& e) {
    throw gl::UsageError(std::string("calibration missing or invalid: ") + e.what());
  }
  options.coupling = args.coupling.empty() ? coupling_preset(args.coupling_preset)
                                           : load_with(args.coupling, gl::read_coupling);
  options.duration = args.duration;
  options.control_rate = args.control_rate;
  options.stream_rate = args.stream_rate;

  SourceHandle handle(args.transport, args.duration);
  const auto report = gl::record(handle.source(), options);
  auto out = open_output(args.out);
  gl::write_demo(out, report.demo);
  std::cout << "rows " << report.demo.demo.samples() << "  frames_received " << report.frames_received << "/"
            << report.expected_frames << "  bytes_skipped " << report.bytes_skipped << '\n';
  if (report.demo.partial) {
    std::cerr << "stream ended early after " << report.bytes_received << " bytes; demo flagged partial\n";
    return kExitTransport;
  }
  return 0;
}

struct TrainArgs {
  std::vector<std::string> demos;
  std::string out;
  int num_basis = 20;
  double width = 0.0;
  double ridge = 1e-6;
  double eps_reg = gl::kDefaultCovarianceReg;
  std::optional<double> sigma_y;
};

int run_train(const TrainArgs& args) {
  std::vector<gl::DemoFile> demos;
  for (const auto& path : args.demos) demos.push_back(gl::load_demo(path));
  gl::TrainOptions options;
  try {
    options.basis = gl::BasisConfig::evenly_spaced(args.num_basis, args.width, args.ridge);
  } catch (const gl::InvalidArgument& e) {
    throw gl::UsageError(e.what());
  }
  options.cov_reg = args.eps_reg;
  options.noise_var_override = args.sigma_y;
  const auto report = gl::train(demos, options);
  gl::save_model(args.out, report.model);
  gl::print_train_summary(std::cout, report, demos.size());
  return 0;
}

struct ReproduceArgs {
  std::string model;
  std::string out;
  std::string summary;
  double duration = 15.0;
  double control_rate = gl::kControlRateHz;
  gl::Gains gains;
  gl::PlantParams plant;
};

int run_reproduce(const ReproduceArgs& args) {
  try {
    args.gains.validate();
    args.plant.validate();
  } catch (const gl::InvalidArgument& e) {
    throw gl::UsageError(e.what());
  }
  const auto model = gl::load_model(args.model);
  gl::ReproduceOptions options;
  options.duration = args.duration;
  options.control_rate = args.control_rate;
  options.gains = {args.gains};
  options.plant = args.plant;
  const auto result = gl::reproduce(model, options);
  const auto labels = gl::model_labels(model);

  auto out = open_output(args.out);
  gl::write_tracking_csv(out, result, labels);
  if (!args.summary.empty()) {
    auto summary = open_output(args.summary);
    gl::write_tracking_summary(summary, result, labels);
  }
  gl::write_tracking_summary(std::cout, result, labels);
  return 0;
}

struct EvalArgs {
  std::string model;
  std::vector<std::string> demos;
  std::string csv;
  std::string report;
  double band = 2.0;
};

int run_eval(const EvalArgs& args) {
  if (args.demos.empty()) throw gl::UsageError("eval needs at least one --demo");
  const auto model = gl::load_model(args.model);
  std::vector<gl::DemoFile> demos;
  for (const auto& path : args.demos) demos.push_back(gl::load_demo(path));
  const auto report = gl::evaluate(model, demos, args.band);
  gl::write_eval_report(std::cout, report);
  if (!args.report.empty()) {
    auto out = open_output(args.report);
    gl::write_eval_report(out, report);
  }
  if (!args.csv.empty()) {
    auto out = open_output(args.csv);
    gl::write_eval_csv(out, model, demos);
  }
  return 0;
}

struct FeedbackArgs {
  std::string tactile;
  std::string transport = "pipe";
  double f_max = 1.0;
  std::vector<double> scale;
  bool realtime = false;
};

int run_feedback(const FeedbackArgs& args) {
  const auto samples = load_with(args.tactile, gl::read_tactile);
  gl::ForceFeedbackMap map;
  map.f_max = args.f_max;
  if (!args.scale.empty()) {
    if (args.scale.size() != gl::kNumChannels) throw gl::UsageError("--scale takes 5 values");
    std::copy(args.scale.begin(), args.scale.end(), map.scale.begin());
  }
  try {
    map.validate();
  } catch (const gl::InvalidArgument& e) {
    throw gl::UsageError(e.what());
  }
  const auto pacing = args.realtime ? gl::Pacing::kRealTime : gl::Pacing::kFast;

  gl::FeedbackReport report;
  if (args.transport.rfind("emulator:", 0) == 0) {
    gl::GloveEmulator emulator(load_emulator_config(args.transport.substr(9)));
    gl::BoundedQueue<gl::PwmCommand> inbox(1u << 20);
    gl::PwmInboxSink sink(inbox);
    report = gl::feedback_loop(map, samples, sink, pacing);
    inbox.close();
    while (auto cmd = inbox.pop()) emulator.handle_pwm(*cmd);
    std::cout << "emulator last_pwm " << format_pwm(emulator.last_pwm()) << '\n';
  } else {
    auto sink = gl::open_sink(args.transport);
    report = gl::feedback_loop(map, samples, *sink, pacing);
    sink->close();
  }
  std::cerr << "commands_sent " << report.sent.size() << '\n';
  return report.transport_closed ? kExitTransport : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glovectl - sensor glove teleoperation and movement-primitive learning"};
  app.require_subcommand(1);

  EmulateArgs emulate;
  auto* cmd_emulate = app.add_subcommand("glove-emulate", "Stream frames from a virtual glove");
  cmd_emulate->add_option("--config", emulate.config, "Emulator config (key = value)")->required();
  cmd_emulate->add_option("--duration", emulate.duration, "Seconds to stream")->required()->check(CLI::PositiveNumber);
  cmd_emulate->add_flag("--fast", emulate.fast, "Write as fast as possible instead of pacing at the frame rate");
  cmd_emulate->add_option("--transport", emulate.transport, "pipe | tcp:PORT | file:PATH")->capture_default_str();
  cmd_emulate->add_option("--pwm-in", emulate.pwm_in, "Source of PWM command lines (pipe | file:PATH | tcp:HOST:PORT)");

  CalibrateArgs calib;
  auto* cmd_calibrate = app.add_subcommand("calibrate", "Capture per-channel flex extrema into a calib-v1 profile");
  cmd_calibrate->add_option("--transport", calib.transport, "pipe | file:PATH | tcp:HOST:PORT | emulator:CONFIG")->required();
  cmd_calibrate->add_option("--duration", calib.duration, "Seconds of stream to observe")->capture_default_str()->check(CLI::PositiveNumber);
  cmd_calibrate->add_option("--stream-rate", calib.stream_rate, "Glove frame rate (Hz)")->capture_default_str()->check(CLI::PositiveNumber);
  cmd_calibrate->add_option("--joint-min", calib.joint_min, "Joint angle at raw minimum (rad)")->capture_default_str();
  cmd_calibrate->add_option("--joint-max", calib.joint_max, "Joint angle at raw maximum (rad)")->capture_default_str();
  cmd_calibrate->add_option("--out", calib.out, "Profile path")->required();

  RecordArgs rec;
  auto* cmd_record = app.add_subcommand("record", "Record a demonstration as demo-v1");
  cmd_record->add_option("--transport", rec.transport, "pipe | file:PATH | tcp:HOST:PORT | emulator:CONFIG")->required();
  cmd_record->add_option("--calibration", rec.calibration, "calib-v1 profile")->required();
  cmd_record->add_option("--coupling", rec.coupling, "coupling-v1 map (overrides --coupling-preset)");
  cmd_record->add_option("--coupling-preset", rec.coupling_preset, "hand4 | hand13 | identity")->capture_default_str();
  cmd_record->add_option("--duration", rec.duration, "Seconds")->capture_default_str()->check(CLI::PositiveNumber);
  cmd_record->add_option("--control-rate", rec.control_rate, "Output rate (Hz)")->capture_default_str()->check(CLI::PositiveNumber);
  cmd_record->add_option("--stream-rate", rec.stream_rate, "Glove frame rate (Hz)")->capture_default_str()->check(CLI::PositiveNumber);
  cmd_record->add_option("--out", rec.out, "demo-v1 output")->required();

  TrainArgs tr;
  auto* cmd_train = app.add_subcommand("train", "Fit a promp-v1 model to demonstrations");
  cmd_train->add_option("--demo", tr.demos, "demo-v1 file (repeat)")->required();
  cmd_train->add_option("--out", tr.out, "promp-v1 output")->required();
  cmd_train->add_option("--basis", tr.num_basis, "Number of Gaussian basis functions K")->capture_default_str();
  cmd_train->add_option("--width", tr.width, "Basis width in phase units (default 1/(K-1))");
  cmd_train->add_option("--ridge", tr.ridge, "Ridge regularizer lambda")->capture_default_str();
  cmd_train->add_option("--eps-reg", tr.eps_reg, "Covariance regularizer (rad^2)")->capture_default_str();
  cmd_train->add_option("--sigma-y", tr.sigma_y, "Fixed observation noise variance (rad^2)");

  ReproduceArgs rep;
  auto* cmd_reproduce = app.add_subcommand("reproduce", "Track the model mean with the simulated impedance controller");
  cmd_reproduce->add_option("--model", rep.model, "promp-v1 model")->required();
  cmd_reproduce->add_option("--out", rep.out, "Tracking CSV")->required();
  cmd_reproduce->add_option("--summary", rep.summary, "Per-joint RMSE summary CSV");
  cmd_reproduce->add_option("--duration", rep.duration, "Seconds")->capture_default_str()->check(CLI::PositiveNumber);
  cmd_reproduce->add_option("--control-rate", rep.control_rate, "Hz")->capture_default_str()->check(CLI::PositiveNumber);
  cmd_reproduce->add_option("--kp", rep.gains.kp, "Stiffness (N m/rad)")->capture_default_str();
  cmd_reproduce->add_option("--kd", rep.gains.kd, "Damping gain (N m s/rad)")->capture_default_str();
  cmd_reproduce->add_option("--inertia", rep.plant.inertia, "Joint inertia (kg m^2)")->capture_default_str();
  cmd_reproduce->add_option("--damping", rep.plant.damping, "Viscous damping (N m s/rad)")->capture_default_str();
  cmd_reproduce->add_option("--torque-limit", rep.plant.torque_limit, "N m")->capture_default_str();

  EvalArgs ev;
  auto* cmd_eval = app.add_subcommand("eval", "Likelihood and band coverage of demonstrations under a model");
  cmd_eval->add_option("--model", ev.model, "promp-v1 model")->required();
  cmd_eval->add_option("--demo", ev.demos, "demo-v1 file (repeat)");
  cmd_eval->add_option("--csv", ev.csv, "Plot CSV (time, mean, std, demos)");
  cmd_eval->add_option("--report", ev.report, "Write the report here as well as stdout");
  cmd_eval->add_option("--band", ev.band, "Band half-width in standard deviations")->capture_default_str();

  FeedbackArgs fb;
  auto* cmd_feedback = app.add_subcommand("feedback", "Send tactile-v1 forces to the glove as PWM commands");
  cmd_feedback->add_option("--tactile", fb.tactile, "tactile-v1 profile")->required();
  cmd_feedback->add_option("--transport", fb.transport, "pipe | file:PATH | tcp:PORT | emulator:CONFIG")->capture_default_str();
  cmd_feedback->add_option("--f-max", fb.f_max, "Tactile full scale")->capture_default_str();
  cmd_feedback->add_option("--scale", fb.scale, "Per-finger scale (5 values)")->expected(5);
  cmd_feedback->add_flag("--realtime", fb.realtime, "Pace commands by the profile time stamps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*cmd_emulate) return run_emulate(emulate);
    if (*cmd_calibrate) return run_calibrate(calib);
    if (*cmd_record) return run_record(rec);
    if (*cmd_train) return run_train(tr);
    if (*cmd_reproduce) return run_reproduce(rep);
    if (*cmd_eval) return run_eval(ev);
    if (*cmd_feedback) return run_feedback(fb);
  } catch (const gl::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const gl::TransportError& e) {
    std::cerr << "transport failure: " << e.what() << '\n';
    return kExitTransport;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
