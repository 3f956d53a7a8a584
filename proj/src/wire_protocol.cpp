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

#include "glovelearn/wire_protocol.hpp"

#include <algorithm>
#include <charconv>

#include "glovelearn/errors.hpp"

namespace glovelearn {

bool SensorFrame::valid() const {
  return std::all_of(channels.begin(), channels.end(),
                     [](std::uint16_t v) { return v <= kMaxRawReading; });
}

PwmCommand PwmCommand::from_values(std::span<const int> values) {
  if (values.size() != kNumChannels) {
    throw InvalidArgument("PWM command needs 5 values, got " + std::to_string(values.size()));
  }
  PwmCommand cmd;
  for (std::size_t i = 0; i < kNumChannels; ++i) {
    if (values[i] < 0 || values[i] > 255) {
      throw InvalidArgument("PWM value out of [0,255]: " + std::to_string(values[i]));
    }
    cmd.duty[i] = static_cast<std::uint8_t>(values[i]);
  }
  return cmd;
}

FrameBytes encode_frame(const SensorFrame& frame) {
  FrameBytes out{};
  out[0] = kFrameSync;
  std::uint8_t checksum = 0;
  for (std::size_t i = 0; i < kNumChannels; ++i) {
    const std::uint16_t v = frame.channels[i];
    if (v > kMaxRawReading) {
      throw InvalidArgument("channel " + std::to_string(i) + " reading " + std::to_string(v) +
                            " exceeds 1023");
    }
    const auto lo = static_cast<std::uint8_t>(v & 0xFF);
    const auto hi = static_cast<std::uint8_t>(v >> 8);
    out[1 + 2 * i] = lo;
    out[2 + 2 * i] = hi;
    checksum ^= lo ^ hi;
  }
  out[11] = checksum;
  out[12] = kFrameTerminator;
  return out;
}

namespace {

// Validates a candidate at p[0..12]; p[0] is already known to be the sync byte.
bool try_decode(const std::uint8_t* p, SensorFrame& frame) {
  if (p[12] != kFrameTerminator) return false;
  std::uint8_t checksum = 0;
  for (std::size_t i = 1; i <= 10; ++i) checksum ^= p[i];
  if (checksum != p[11]) return false;
  for (std::size_t i = 0; i < kNumChannels; ++i) {
    const std::uint16_t v = static_cast<std::uint16_t>(p[1 + 2 * i] | (p[2 + 2 * i] << 8));
    if (v > kMaxRawReading) return false;
    frame.channels[i] = v;
  }
  return true;
}

}  // namespace

std::vector<DecodedFrame> StreamParser::feed_with_offsets(std::span<const std::uint8_t> bytes) {
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());

  std::vector<DecodedFrame> out;
  std::size_t pos = 0;
  const std::size_t n = buffer_.size();
  while (pos < n) {
    if (buffer_[pos] != kFrameSync) {
      ++pos;
      ++bytes_skipped_;
      continue;
    }
    if (n - pos < kFrameSize) break;
    SensorFrame frame;
    if (try_decode(buffer_.data() + pos, frame)) {
      out.push_back({frame, consumed_ + pos});
      pos += kFrameSize;
      ++frames_decoded_;
    } else {
      ++pos;
      ++bytes_skipped_;
    }
  }
  buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(pos));
  consumed_ += pos;
  return out;
}

std::vector<SensorFrame> StreamParser::feed(std::span<const std::uint8_t> bytes) {
  auto decoded = feed_with_offsets(bytes);
  std::vector<SensorFrame> frames;
  frames.reserve(decoded.size());
  for (const auto& d : decoded) frames.push_back(d.frame);
  return frames;
}

std::string encode_pwm_command(const PwmCommand& cmd) {
  std::string line = "P";
  for (const std::uint8_t v : cmd.duty) {
    line += ' ';
    line += std::to_string(static_cast<int>(v));
  }
  line += '\n';
  return line;
}

PwmCommand parse_pwm_command(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (line.size() < 2 || line[0] != 'P' || line[1] != ' ') {
    throw ParseError("malformed PWM command (unknown verb): '" + std::string(line) + "'");
  }
  line.remove_prefix(2);

  std::array<int, kNumChannels> values{};
  std::size_t count = 0;
  while (true) {
    const auto space = line.find(' ');
    const std::string_view token = line.substr(0, space);
    if (count == kNumChannels) {
      throw ParseError("malformed PWM command: more than 5 fields");
    }
    int v = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
      throw ParseError("malformed PWM command: non-numeric field '" + std::string(token) + "'");
    }
    if (v < 0 || v > 255) {
      throw ParseError("malformed PWM command: value out of [0,255]: " + std::to_string(v));
    }
    values[count++] = v;
    if (space == std::string_view::npos) break;
    line.remove_prefix(space + 1);
  }
  if (count != kNumChannels) {
    throw ParseError("malformed PWM command: expected 5 fields, got " + std::to_string(count));
  }
  return PwmCommand::from_values(values);
}

std::vector<PwmCommand> PwmLineReader::feed(std::string_view bytes) {
  pending_.append(bytes);
  std::vector<PwmCommand> out;
  std::size_t start = 0;
  for (std::size_t nl = pending_.find('\n'); nl != std::string::npos;
       nl = pending_.find('\n', start)) {
    try {
      out.push_back(parse_pwm_command(std::string_view(pending_).substr(start, nl - start)));
    } catch (const ParseError&) {
      ++rejected_;
    }
    start = nl + 1;
  }
  pending_.erase(0, start);
  return out;
}

}  // namespace glovelearn
