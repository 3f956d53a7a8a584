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

// Glove stream framing.
//
// Sensor frame (13 bytes, host <- glove):
//
//   offset  size  field
//   0       1     sync 0xA5
//   1       10    5 x uint16 little-endian flex readings, each in [0, 1023]
//   11      1     XOR of bytes 1..10
//   12      1     terminator 0x0A
//
// PWM command (ASCII line, host -> glove):  "P <v1> <v2> <v3> <v4> <v5>\n"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace glovelearn {

inline constexpr std::size_t kNumChannels = 5;
inline constexpr std::uint16_t kMaxRawReading = 1023;
inline constexpr std::size_t kFrameSize = 13;
inline constexpr std::uint8_t kFrameSync = 0xA5;
inline constexpr std::uint8_t kFrameTerminator = 0x0A;

inline constexpr double kStreamRateHz = 350.0;
inline constexpr int kBaudRate = 115200;

struct SensorFrame {
  std::array<std::uint16_t, kNumChannels> channels{};

  bool valid() const;
  friend bool operator==(const SensorFrame&, const SensorFrame&) = default;
};

/// Five fingertip vibration duty cycles. The element type bounds every value to [0, 255].
struct PwmCommand {
  std::array<std::uint8_t, kNumChannels> duty{};

  /// Throws InvalidArgument if any value is outside [0, 255].
  static PwmCommand from_values(std::span<const int> values);
  friend bool operator==(const PwmCommand&, const PwmCommand&) = default;
};

using FrameBytes = std::array<std::uint8_t, kFrameSize>;

/// Throws InvalidArgument if any channel exceeds 1023.
FrameBytes encode_frame(const SensorFrame& frame);

struct DecodedFrame {
  SensorFrame frame;
  /// Offset of the sync byte, counted from the first byte ever fed to the parser.
  std::uint64_t stream_offset = 0;
};

/// Incremental, resynchronising decoder for the sensor stream.
///
/// Bytes may arrive in arbitrary chunks. A candidate frame starting at 0xA5
/// that fails the checksum, the terminator or the channel range check
/// costs exactly one skipped byte; scanning then resumes at the next 0xA5.
/// Single owner; not safe for concurrent use.
class StreamParser {
 public:
  std::vector<SensorFrame> feed(std::span<const std::uint8_t> bytes);
  std::vector<DecodedFrame> feed_with_offsets(std::span<const std::uint8_t> bytes);

  std::uint64_t frames_decoded() const { return frames_decoded_; }
  std::uint64_t bytes_skipped() const { return bytes_skipped_; }
  std::size_t pending() const { return buffer_.size(); }
  /// Total bytes accepted so far, including pending ones.
  std::uint64_t bytes_seen() const { return consumed_ + buffer_.size(); }

 private:
  std::vector<std::uint8_t> buffer_;
  std::uint64_t consumed_ = 0;  // stream offset of buffer_[0]
  std::uint64_t frames_decoded_ = 0;
  std::uint64_t bytes_skipped_ = 0;
};

/// Throws InvalidArgument on out-of-range duty values (only reachable via from_values).
std::string encode_pwm_command(const PwmCommand& cmd);

/// Accepts the line with or without its trailing '\n'. Throws ParseError on
/// an unknown verb, wrong field count, non-numeric token or value > 255.
PwmCommand parse_pwm_command(std::string_view line);

/// Splits a byte stream of PWM lines; partial lines are retained.
class PwmLineReader {
 public:
  /// Malformed lines are counted and dropped.
  std::vector<PwmCommand> feed(std::string_view bytes);
  std::uint64_t rejected() const { return rejected_; }

 private:
  std::string pending_;
  std::uint64_t rejected_ = 0;
};

}  // namespace glovelearn
