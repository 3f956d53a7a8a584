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

// demo-v1 (recorded demonstration):
//
//   demo-v1
//   D <joints>
//   dt <seconds>
//   status complete|partial
//   labels <label_1> ... <label_D>
//   time,<label_1>,...,<label_D>
//   <t>,<q_1>,...,<q_D>                       (row i at t = i * dt)
//
// tactile-v1 (scripted fingertip forces for the feedback loop):
//
//   tactile-v1
//   time,f1,f2,f3,f4,f5
//   <t>,<f_1>,...,<f_5>                       (t strictly increasing)

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "glovelearn/trajectory_model.hpp"
#include "glovelearn/wire_protocol.hpp"

namespace glovelearn {

struct DemoFile {
  Demonstration demo;
  std::vector<std::string> labels;
  bool partial = false;
};

void write_demo(std::ostream& out, const DemoFile& file);
/// Throws ParseError on a malformed file, including a time column off the dt grid.
DemoFile read_demo(std::istream& in);

struct TactileSample {
  double time = 0.0;
  std::array<double, kNumChannels> force{};
};

void write_tactile(std::ostream& out, const std::vector<TactileSample>& samples);
std::vector<TactileSample> read_tactile(std::istream& in);

/// File helpers; throw ParseError when the file cannot be opened.
DemoFile load_demo(const std::filesystem::path& path);
void save_demo(const std::filesystem::path& path, const DemoFile& file);
TrajectoryModel load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const TrajectoryModel& model);

}  // namespace glovelearn
