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
#include <cstdint>
#include <random>

#include "glovelearn/bounded_queue.hpp"
#include "glovelearn/transport.hpp"
#include "glovelearn/wire_protocol.hpp"

namespace glovelearn {

struct ChannelWaveform {
  double offset = 512.0;     // counts
  double amplitude = 0.0;    // counts
  double frequency = 0.0;    // Hz
  double phase = 0.0;        // rad
};

struct EmulatorConfig {
  double rate = kStreamRateHz;
  std::array<ChannelWaveform, kNumChannels> channels{};
  double noise_std = 0.0;  // counts
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on rate <= 0, negative noise or amplitude, or offset outside [0, 1023].
  void validate() const;
};

/// Virtual glove. Channel i at clock t reads
///   clamp(round(offset + amplitude * sin(2 pi f t + phase) + noise), 0, 1023).
class GloveEmulator {
 public:
  explicit GloveEmulator(EmulatorConfig config);

  SensorFrame step();
  void handle_pwm(const PwmCommand& cmd) { last_pwm_ = cmd; }

  const PwmCommand& last_pwm() const { return last_pwm_; }
  double clock() const { return static_cast<double>(steps_) / config_.rate; }
  std::uint64_t steps() const { return steps_; }
  const EmulatorConfig& config() const { return config_; }

  /// Noise-free channel value (before rounding and clamping) at time t.
  double waveform(std::size_t channel, double t) const;

 private:
  double gaussian();

  EmulatorConfig config_;
  std::uint64_t steps_ = 0;
  PwmCommand last_pwm_{};
  std::mt19937_64 rng_;
};

/// floor(duration * rate), tolerant to representation error in the product.
std::uint64_t frame_count(double duration, double rate);

enum class Pacing { kFast, kRealTime };

struct EmulatorRunResult {
  std::uint64_t frames_written = 0;
  bool transport_closed = false;
};

/// Streams floor(duration * rate) encoded frames. Pending PWM commands are
/// drained from `pwm_inbox` before every frame. Stops early, without
/// throwing, if the sink reports it is closed.
EmulatorRunResult run_emulator(GloveEmulator& emulator, double duration, ByteSink& sink,
                               Pacing pacing = Pacing::kFast,
                               BoundedQueue<PwmCommand>* pwm_inbox = nullptr);

/// Sink that parses PWM lines and forwards them to an emulator inbox.
class PwmInboxSink : public ByteSink {
 public:
  explicit PwmInboxSink(BoundedQueue<PwmCommand>& inbox) : inbox_(inbox) {}
  bool write(std::span<const std::uint8_t> bytes) override;
  std::uint64_t rejected() const { return reader_.rejected(); }

 private:
  BoundedQueue<PwmCommand>& inbox_;
  PwmLineReader reader_;
};

}  // namespace glovelearn
