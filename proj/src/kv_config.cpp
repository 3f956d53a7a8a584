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

#include "glovelearn/kv_config.hpp"

#include <istream>
#include <ostream>

#include "glovelearn/errors.hpp"
#include "glovelearn/text_io.hpp"

namespace glovelearn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

KeyValues read_key_values(std::istream& in) {
  KeyValues values;
  std::string line;
  int line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(text.substr(0, eq)));
    if (key.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty key");
    if (!values.emplace(key, std::string(trim(text.substr(eq + 1)))).second) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return values;
}

EmulatorConfig read_emulator_config(std::istream& in) {
  EmulatorConfig config;
  for (const auto& [key, value] : read_key_values(in)) {
    if (key == "rate") {
      config.rate = parse_double(value, key);
    } else if (key == "noise_std") {
      config.noise_std = parse_double(value, key);
    } else if (key == "seed") {
      const long long seed = parse_integer(value, key);
      if (seed < 0) throw ParseError("seed must be >= 0");
      config.seed = static_cast<std::uint64_t>(seed);
    } else if (key.rfind("channel", 0) == 0 && key.size() > 9 && key[8] == '.') {
      const int ch = key[7] - '0';
      if (ch < 1 || ch > static_cast<int>(kNumChannels)) throw ParseError("unknown key '" + key + "'");
      auto& wave = config.channels[ch - 1];
      const std::string field = key.substr(9);
      if (field == "offset") {
        wave.offset = parse_double(value, key);
      } else if (field == "amplitude") {
        wave.amplitude = parse_double(value, key);
      } else if (field == "frequency") {
        wave.frequency = parse_double(value, key);
      } else if (field == "phase") {
        wave.phase = parse_double(value, key);
      } else {
        throw ParseError("unknown key '" + key + "'");
      }
    } else {
      throw ParseError("unknown key '" + key + "'");
    }
  }
  try {
    config.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("emulator config: ") + e.what());
  }
  return config;
}

void write_emulator_config(std::ostream& out, const EmulatorConfig& config) {
  out << "rate = " << format_double(config.rate) << '\n';
  out << "noise_std = " << format_double(config.noise_std) << '\n';
  out << "seed = " << config.seed << '\n';
  for (std::size_t i = 0; i < kNumChannels; ++i) {
    const auto& c = config.channels[i];
    const std::string prefix = "channel" + std::to_string(i + 1) + ".";
    out << prefix << "offset = " << format_double(c.offset) << '\n';
    out << prefix << "amplitude = " << format_double(c.amplitude) << '\n';
    out << prefix << "frequency = " << format_double(c.frequency) << '\n';
    out << prefix << "phase = " << format_double(c.phase) << '\n';
  }
}

}  // namespace glovelearn
