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

#include "glovelearn/emulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "glovelearn/errors.hpp"

namespace glovelearn {

void EmulatorConfig::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidArgument("emulator rate must be > 0");
  if (!(noise_std >= 0.0)) throw InvalidArgument("noise_std must be >= 0");
  for (std::size_t i = 0; i < kNumChannels; ++i) {
    const auto& c = channels[i];
    if (!(c.offset >= 0.0 && c.offset <= kMaxRawReading)) {
      throw InvalidArgument("channel " + std::to_string(i + 1) + " offset outside [0,1023]");
    }
    if (!(c.amplitude >= 0.0) || !std::isfinite(c.frequency) || !std::isfinite(c.phase)) {
      throw InvalidArgument("channel " + std::to_string(i + 1) + " has an invalid waveform");
    }
  }
}

GloveEmulator::GloveEmulator(EmulatorConfig config) : config_(config), rng_(config.seed) {
  config_.validate();
}

double GloveEmulator::waveform(std::size_t channel, double t) const {
  const auto& c = config_.channels[channel];
  return c.offset + c.amplitude * std::sin(2.0 * std::numbers::pi * c.frequency * t + c.phase);
}

// Box-Muller over the raw engine output; std::normal_distribution is not
// reproducible across standard libraries.
double GloveEmulator::gaussian() {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * kScale;  // (0, 1]
  const double u2 = static_cast<double>(rng_() >> 11) * kScale;          // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SensorFrame GloveEmulator::step() {
  const double t = clock();
  SensorFrame frame;
  for (std::size_t i = 0; i < kNumChannels; ++i) {
    double v = waveform(i, t);
    if (config_.noise_std > 0.0) v += config_.noise_std * gaussian();
    frame.channels[i] = static_cast<std::uint16_t>(std::clamp(std::round(v), 0.0, double{kMaxRawReading}));
  }
  ++steps_;
  return frame;
}

std::uint64_t frame_count(double duration, double rate) {
  const double product = duration * rate;
  if (!(product > 0.0)) return 0;
  return static_cast<std::uint64_t>(std::floor(product * (1.0 + 1e-12)));
}

EmulatorRunResult run_emulator(GloveEmulator& emulator, double duration, ByteSink& sink,
                               Pacing pacing, BoundedQueue<PwmCommand>* pwm_inbox) {
  if (!(duration > 0.0)) throw InvalidArgument("emulation duration must be > 0");
  const std::uint64_t total = frame_count(duration, emulator.config().rate);
  const auto period = std::chrono::duration<double>(1.0 / emulator.config().rate);
  const auto start = std::chrono::steady_clock::now();

  EmulatorRunResult result;
  for (std::uint64_t i = 0; i < total; ++i) {
    if (pwm_inbox != nullptr) {
      while (auto cmd = pwm_inbox->try_pop()) emulator.handle_pwm(*cmd);
    }
    if (pacing == Pacing::kRealTime) {
      std::this_thread::sleep_until(
          start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(period * static_cast<double>(i)));
    }
    const FrameBytes bytes = encode_frame(emulator.step());
    if (!sink.write(bytes)) {
      result.transport_closed = true;
      break;
    }
    ++result.frames_written;
  }
  if (pwm_inbox != nullptr) {
    while (auto cmd = pwm_inbox->try_pop()) emulator.handle_pwm(*cmd);
  }
  return result;
}

bool PwmInboxSink::write(std::span<const std::uint8_t> bytes) {
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  for (const auto& cmd : reader_.feed(text)) {
    if (!inbox_.push(cmd)) return false;
  }
  return true;
}

}  // namespace glovelearn
