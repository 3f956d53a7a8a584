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

#include "glovelearn/formats.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "glovelearn/errors.hpp"
#include "glovelearn/text_io.hpp"

namespace glovelearn {

void write_demo(std::ostream& out, const DemoFile& file) {
  const auto& values = file.demo.values;
  out << "demo-v1\n";
  out << "D " << values.cols() << '\n';
  out << "dt " << format_double(file.demo.dt) << '\n';
  out << "status " << (file.partial ? "partial" : "complete") << '\n';
  out << "labels";
  for (const auto& label : file.labels) out << ' ' << label;
  out << '\n';
  out << "time";
  for (const auto& label : file.labels) out << ',' << label;
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out << format_double(double(i) * file.demo.dt);
    for (Eigen::Index d = 0; d < values.cols(); ++d) out << ',' << format_double(values(i, d));
    out << '\n';
  }
}

namespace {

std::vector<std::string_view> header_fields(std::istream& in, std::string& line, std::string_view key) {
  if (!next_line(in, line)) throw ParseError("demo-v1: missing '" + std::string(key) + "' line");
  auto fields = split_whitespace(line);
  if (fields.empty() || fields[0] != key) {
    throw ParseError("demo-v1: expected '" + std::string(key) + "', got '" + line + "'");
  }
  fields.erase(fields.begin());
  return fields;
}

}  // namespace

DemoFile read_demo(std::istream& in) {
  expect_header(in, "demo-v1");
  std::string line;
  DemoFile file;

  auto fields = header_fields(in, line, "D");
  if (fields.size() != 1) throw ParseError("demo-v1: 'D' takes one value");
  const long long dims = parse_integer(fields[0], "D");
  if (dims < 1) throw ParseError("demo-v1: D must be >= 1");

  fields = header_fields(in, line, "dt");
  if (fields.size() != 1) throw ParseError("demo-v1: 'dt' takes one value");
  file.demo.dt = parse_double(fields[0], "dt");
  if (!(file.demo.dt > 0.0)) throw ParseError("demo-v1: dt must be > 0");

  fields = header_fields(in, line, "status");
  if (fields.size() != 1 || (fields[0] != "complete" && fields[0] != "partial")) {
    throw ParseError("demo-v1: status must be 'complete' or 'partial'");
  }
  file.partial = fields[0] == "partial";

  for (const auto label : header_fields(in, line, "labels")) file.labels.emplace_back(label);
  if (static_cast<long long>(file.labels.size()) != dims) {
    throw ParseError("demo-v1: expected " + std::to_string(dims) + " labels");
  }
  std::string columns = "time";
  for (const auto& label : file.labels) columns += "," + label;
  if (!next_line(in, line) || line != columns) {
    throw ParseError("demo-v1: column header must be '" + columns + "'");
  }

  std::vector<double> flat;
  Eigen::Index rows = 0;
  while (next_line(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != static_cast<std::size_t>(dims + 1)) {
      throw ParseError("demo-v1: row " + std::to_string(rows) + " has " + std::to_string(cells.size()) +
                       " columns, expected " + std::to_string(dims + 1));
    }
    const double t = parse_double(cells[0], "time");
    const double expected = double(rows) * file.demo.dt;
    if (std::abs(t - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      throw ParseError("demo-v1: row " + std::to_string(rows) + " time " + std::string(cells[0]) +
                       " is off the dt grid");
    }
    for (std::size_t c = 1; c < cells.size(); ++c) flat.push_back(parse_double(cells[c], "joint angle"));
    ++rows;
  }
  if (rows < 2) throw ParseError("demo-v1: need at least 2 rows");
  file.demo.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), rows, static_cast<Eigen::Index>(dims));
  return file;
}

void write_tactile(std::ostream& out, const std::vector<TactileSample>& samples) {
  out << "tactile-v1\ntime,f1,f2,f3,f4,f5\n";
  for (const auto& s : samples) {
    out << format_double(s.time);
    for (const double f : s.force) out << ',' << format_double(f);
    out << '\n';
  }
}

std::vector<TactileSample> read_tactile(std::istream& in) {
  expect_header(in, "tactile-v1");
  std::string line;
  if (!next_line(in, line) || split(line, ',').size() != kNumChannels + 1) {
    throw ParseError("tactile-v1: bad column header '" + line + "'");
  }
  std::vector<TactileSample> samples;
  while (next_line(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != kNumChannels + 1) throw ParseError("tactile-v1: expected 6 columns in '" + line + "'");
    TactileSample s;
    s.time = parse_double(cells[0], "time");
    if (!samples.empty() && !(s.time > samples.back().time)) {
      throw ParseError("tactile-v1: time must be strictly increasing");
    }
    for (std::size_t i = 0; i < kNumChannels; ++i) s.force[i] = parse_double(cells[i + 1], "force");
    samples.push_back(s);
  }
  return samples;
}

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path.string());
  return out;
}

}  // namespace

DemoFile load_demo(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_demo(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_demo(const std::filesystem::path& path, const DemoFile& file) {
  auto out = open_out(path);
  write_demo(out, file);
}

TrajectoryModel load_model(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_model(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_model(const std::filesystem::path& path, const TrajectoryModel& model) {
  auto out = open_out(path);
  write_model(out, model);
}

}  // namespace glovelearn
