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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "glovelearn/errors.hpp"
#include "glovelearn/formats.hpp"

using namespace glovelearn;

namespace {

DemoFile sample_demo() {
  DemoFile f;
  f.demo.dt = 0.005;
  f.demo.values.resize(4, 2);
  f.demo.values << 0.1, 1.0 / 3.0, 0.2, -0.0, 0.30000000000000004, 1e-17, 1.5707963267948966, 2.0;
  f.labels = {"thumb", "aperture"};
  return f;
}

std::string to_text(const DemoFile& f) {
  std::ostringstream out;
  write_demo(out, f);
  return out.str();
}

void expect_demo_error(const std::string& text) {
  std::istringstream in(text);
  CHECK_THROWS_AS(read_demo(in), ParseError);
}

}  // namespace

TEST_CASE("demo-v1 layout") {
  const std::string text = to_text(sample_demo());
  CHECK(text.rfind("demo-v1\nD 2\ndt 0.0050000000000000001\nstatus complete\nlabels thumb aperture\n"
                   "time,thumb,aperture\n0,0.10000000000000001,0.33333333333333331\n",
                   0) == 0);
  // Negative zero is written as plain zero.
  CHECK(text.find("-0,") == std::string::npos);
}

TEST_CASE("demo-v1 round trip is exact") {
  for (bool partial : {false, true}) {
    DemoFile f = sample_demo();
    f.partial = partial;
    const std::string first = to_text(f);
    std::istringstream in(first);
    const DemoFile back = read_demo(in);
    CHECK(back.partial == partial);
    CHECK(back.labels == f.labels);
    CHECK(back.demo.dt == f.demo.dt);
    CHECK(back.demo.values == f.demo.values.unaryExpr([](double v) { return v == 0.0 ? 0.0 : v; }));
    CHECK(to_text(back) == first);
  }
}

TEST_CASE("demo-v1 rejects malformed input") {
  const std::string good = to_text(sample_demo());
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  expect_demo_error("");
  expect_demo_error(replace("demo-v1", "demo-v2"));
  expect_demo_error(replace("D 2", "D 3"));
  expect_demo_error(replace("dt 0.0050000000000000001", "dt -1"));
  expect_demo_error(replace("status complete", "status maybe"));
  expect_demo_error(replace("labels thumb aperture", "labels thumb"));
  expect_demo_error(replace("time,thumb,aperture", "time,thumb,index"));
  expect_demo_error(replace("0,0.10000000000000001", "0,abc"));
  expect_demo_error(replace("0,0.10000000000000001", "0,nan"));
  expect_demo_error(replace("0.0050000000000000001,0.20000000000000001", "0.25,0.20000000000000001"));
  expect_demo_error(replace(",0.33333333333333331\n", "\n"));
  // Fewer than two rows cannot define a trajectory.
  std::string head = good.substr(0, good.find("0.0050000000000000001,"));
  expect_demo_error(head);
}

TEST_CASE("tactile-v1 round trip") {
  std::vector<TactileSample> samples(3);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].time = 0.1 * double(i);
    for (std::size_t c = 0; c < kNumChannels; ++c) samples[i].force[c] = 0.5 * double(i + c);
  }
  std::ostringstream first;
  write_tactile(first, samples);
  CHECK(first.str().rfind("tactile-v1\ntime,f1,f2,f3,f4,f5\n0,0,0.5,1,1.5,2\n", 0) == 0);
  std::istringstream in(first.str());
  const auto back = read_tactile(in);
  REQUIRE(back.size() == 3);
  std::ostringstream second;
  write_tactile(second, back);
  CHECK(first.str() == second.str());

  std::istringstream backwards("tactile-v1\ntime,f1,f2,f3,f4,f5\n1,0,0,0,0,0\n0.5,0,0,0,0,0\n");
  CHECK_THROWS_AS(read_tactile(backwards), ParseError);
  std::istringstream short_row("tactile-v1\ntime,f1,f2,f3,f4,f5\n0,1,2\n");
  CHECK_THROWS_AS(read_tactile(short_row), ParseError);
}

TEST_CASE("file helpers") {
  const auto dir = std::filesystem::temp_directory_path() / "glovelearn_formats_test";
  std::filesystem::create_directories(dir);
  save_demo(dir / "d.csv", sample_demo());
  CHECK(to_text(load_demo(dir / "d.csv")) == to_text(sample_demo()));
  CHECK_THROWS_AS(load_demo(dir / "missing.csv"), ParseError);
  std::filesystem::remove_all(dir);
}
