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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "glove_fixture.hpp"
#include "glovelearn/text_io.hpp"
#include "oracles.hpp"

using namespace glovelearn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

// 1 ---------------------------------------------------------------------------

Outcome protocol_round_trip() {
  const auto start = Clock::now();
  constexpr std::size_t n = 100000;
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> reading(0, kMaxRawReading);
  std::vector<SensorFrame> frames(n);
  std::vector<std::uint8_t> bytes;
  bytes.reserve(n * kFrameSize);
  for (auto& f : frames) {
    for (auto& c : f.channels) c = static_cast<std::uint16_t>(reading(rng));
    const auto encoded = encode_frame(f);
    bytes.insert(bytes.end(), encoded.begin(), encoded.end());
  }

  StreamParser clean;
  std::vector<SensorFrame> decoded;
  std::uniform_int_distribution<std::size_t> chunk(1, 97);
  for (std::size_t pos = 0; pos < bytes.size();) {
    const std::size_t len = std::min(chunk(rng), bytes.size() - pos);
    for (const auto& f : clean.feed(std::span(bytes).subspan(pos, len))) decoded.push_back(f);
    pos += len;
  }
  const bool clean_ok = decoded == frames && clean.bytes_skipped() == 0;

  // Flip 1% of the bytes, then demand every untouched frame back at its offset.
  auto corrupted = bytes;
  std::vector<bool> touched(n, false);
  std::uniform_int_distribution<std::size_t> where(0, corrupted.size() - 1);
  std::uniform_int_distribution<int> mask(1, 255);
  for (std::size_t i = 0; i < corrupted.size() / 100; ++i) {
    const std::size_t p = where(rng);
    corrupted[p] ^= static_cast<std::uint8_t>(mask(rng));
    touched[p / kFrameSize] = true;
  }
  StreamParser noisy;
  std::vector<bool> recovered(n, false);
  for (const auto& d : noisy.feed_with_offsets(corrupted)) {
    if (d.stream_offset % kFrameSize != 0) continue;
    const std::size_t idx = d.stream_offset / kFrameSize;
    if (d.frame == frames[idx]) recovered[idx] = true;
  }
  std::size_t intact = 0, missed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (touched[i]) continue;
    ++intact;
    if (!recovered[i]) ++missed;
  }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = clean_ok && missed == 0 && elapsed < 5.0;
  o.detail = fmt("clean %.0f/100000 frames, %.0f skipped bytes; ", double(decoded.size()),
                 double(clean.bytes_skipped())) +
             fmt("corrupted: %.0f of %.0f intact frames recovered; %.2f s (limit 5 s)", double(intact - missed),
                 double(intact), elapsed);
  return o;
}

// 2 ---------------------------------------------------------------------------

Outcome parser_throughput() {
  EmulatorConfig config = fixture::grasp_config(7, 6.0);
  const auto bytes = fixture::emulate(config, 3000.0);
  const std::size_t expected = bytes.size() / kFrameSize;
  const auto start = Clock::now();
  StreamParser parser;
  std::size_t frames = 0;
  for (std::size_t pos = 0; pos < bytes.size(); pos += 4096) {
    frames += parser.feed(std::span(bytes).subspan(pos, std::min<std::size_t>(4096, bytes.size() - pos))).size();
  }
  const double elapsed = seconds_since(start);
  const double rate = double(frames) / elapsed;
  return {frames == expected && rate >= 35000.0,
          fmt("%.0f frames in %.3f s = %.0f frames/s (need >= 35000)", double(frames), elapsed, rate)};
}

// 3 ---------------------------------------------------------------------------

Outcome regression_oracle() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double lambdas[] = {0.0, 1e-6, 1e-2};
  constexpr int t = 50, k = 10, dims = 3;
  double worst = 0.0;
  for (int problem = 0; problem < 100; ++problem) {
    const double lambda = lambdas[problem % 3];
    Demonstration demo;
    demo.values.resize(t, dims);
    for (int i = 0; i < t; ++i) {
      for (int d = 0; d < dims; ++d) demo.values(i, d) = u(rng);
    }
    const auto config = BasisConfig::evenly_spaced(k, 0.0, lambda);
    const auto w = fit_weights(demo, config);
    for (int d = 0; d < dims; ++d) {
      std::vector<double> y(t);
      for (int i = 0; i < t; ++i) y[i] = demo.values(i, d);
      const auto ref = oracle::ridge_weights(y, k, 1.0 / (k - 1), lambda);
      for (int j = 0; j < k; ++j) worst = std::max(worst, std::abs(w.w(j, d) - ref[j]));
    }
  }
  return {worst <= 1e-8, fmt("100 problems, max |w - w_oracle| = %.3g (limit 1e-8)", worst)};
}

// 4 ---------------------------------------------------------------------------

Outcome basis_identities() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> phase(0.0, 1.0);
  std::uniform_int_distribution<int> kdist(2, 40);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto row = basis_row(phase(rng), BasisConfig::evenly_spaced(kdist(rng)));
    worst = std::max(worst, std::abs(row.sum() - 1.0));
  }
  bool single_exact = true;
  for (int i = 0; i < 1000; ++i) single_exact &= basis_row(phase(rng), BasisConfig::evenly_spaced(1))[0] == 1.0;
  return {worst <= 1e-12 && single_exact,
          fmt("max |sum - 1| = %.3g over 1e4 phases (limit 1e-12); K=1 exact: ", worst) +
              (single_exact ? "yes" : "no")};
}

// 5 ---------------------------------------------------------------------------

Outcome distribution_statistics() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst_cov = 0.0, worst_mean = 0.0;
  for (int set = 0; set < 50; ++set) {
    std::vector<WeightMatrix> weights(3);
    std::vector<std::vector<double>> stacked;
    for (auto& w : weights) {
      w.w.resize(4, 2);
      for (Eigen::Index i = 0; i < w.w.size(); ++i) w.w.data()[i] = u(rng);
      const auto s = w.stacked();
      stacked.emplace_back(s.data(), s.data() + s.size());
    }
    const auto dist = fit_distribution(weights);
    const auto cov = oracle::sample_covariance(stacked);
    for (std::size_t i = 0; i < cov.size(); ++i) {
      const double mean = (stacked[0][i] + stacked[1][i] + stacked[2][i]) / 3.0;
      worst_mean = std::max(worst_mean, std::abs(dist.mean[Eigen::Index(i)] - mean));
      for (std::size_t j = 0; j < cov.size(); ++j) {
        const double expected = cov[i][j] + (i == j ? kDefaultCovarianceReg : 0.0);
        worst_cov = std::max(worst_cov, std::abs(dist.covariance(Eigen::Index(i), Eigen::Index(j)) - expected));
      }
    }
  }
  WeightMatrix same;
  same.w = Eigen::MatrixXd::Random(20, 13);
  const std::vector<WeightMatrix> copies(3, same);
  const auto dist = fit_distribution(copies);
  const bool exact = dist.covariance == kDefaultCovarianceReg * Eigen::MatrixXd::Identity(260, 260) &&
                     dist.mean == same.stacked();
  return {worst_cov <= 1e-12 && worst_mean <= 1e-12 && exact,
          fmt("max cov diff %.3g, max mean diff %.3g (limit 1e-12); identical inputs give eps*I: ", worst_cov,
              worst_mean) +
              (exact ? "yes" : "no")};
}

// 8, 9, 10 share one end-to-end fixture --------------------------------------

struct PipelineRun {
  std::vector<DemoFile> demos;
  TrainReport trained;
  TrackingResult tracking;
  EvalReport eval;
  double seconds = 0.0;
};

PipelineRun run_pipeline() {
  const auto start = Clock::now();
  PipelineRun run;
  const auto profile = fixture::calibration();
  for (std::uint64_t seed : {11, 12}) {
    const auto bytes = fixture::emulate(fixture::grasp_config(seed, 6.0), 15.0);
    run.demos.push_back(fixture::record_bytes(bytes, profile, CouplingMap::hand13(), 15.0).demo);
  }
  run.trained = train(run.demos, TrainOptions{});
  run.tracking = reproduce(run.trained.model, ReproduceOptions{});
  run.eval = evaluate(run.trained.model, run.demos);
  run.seconds = seconds_since(start);
  return run;
}

// 6 ---------------------------------------------------------------------------

Outcome linearity(const PipelineRun& run) {
  const auto& model = run.trained.model;
  const Eigen::Index t = run.demos[0].demo.samples();
  const auto phi = basis_matrix(t, model.basis);
  const Eigen::MatrixXd average = 0.5 * (phi * run.trained.weights[0].w + phi * run.trained.weights[1].w);
  const double worst = (mean_trajectory(model, t) - average).cwiseAbs().maxCoeff();
  return {worst <= 1e-9, fmt("two-demo model, max |mean - average reconstruction| = %.3g (limit 1e-9)", worst)};
}

// 7 ---------------------------------------------------------------------------

Outcome variance_sanity(const PipelineRun& run) {
  const auto& model = run.trained.model;
  const Eigen::Index t = 3000;
  const Eigen::MatrixXd std_all = marginal_std(model, t);
  const double floor = std::sqrt(model.cov_reg);
  const double smallest = std_all.minCoeff();

  // Sample weights and observation noise directly, then compare spreads.
  const Eigen::Index k = model.num_basis(), dims = model.dims;
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < t; i += 150) rows.push_back(i);
  rows.push_back(t - 1);
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size()) * dims;
  Eigen::MatrixXd select = Eigen::MatrixXd::Zero(m, k * dims);
  Eigen::VectorXd noise_sd(m), analytic(m);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto phi = basis_row(sample_phase(rows[r], t), model.basis);
    for (Eigen::Index d = 0; d < dims; ++d) {
      const Eigen::Index out = Eigen::Index(r) * dims + d;
      select.block(out, d * k, 1, k) = phi.transpose();
      noise_sd[out] = std::sqrt(model.noise_var[d]);
      analytic[out] = std_all(rows[r], d);
    }
  }
  const Eigen::MatrixXd chol = model.cov_w.llt().matrixL();
  const Eigen::MatrixXd mix = select * chol;
  const Eigen::VectorXd centre = select * model.mean_w;

  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  constexpr int draws = 100000, batch = 10000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(m), sum_sq = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd z(k * dims, batch), e(m, batch);
  for (int done = 0; done < draws; done += batch) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = gauss(rng);
    for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = gauss(rng);
    const Eigen::MatrixXd y = (mix * z + noise_sd.asDiagonal() * e).colwise() + centre;
    sum += y.rowwise().sum();
    sum_sq += y.cwiseAbs2().rowwise().sum();
  }
  const Eigen::VectorXd mean = sum / draws;
  const Eigen::VectorXd mc =
      ((sum_sq - draws * mean.cwiseAbs2()) / double(draws - 1)).cwiseMax(0.0).cwiseSqrt();
  const double worst = ((mc.array() / analytic.array()) - 1.0).abs().maxCoeff();
  return {smallest >= floor && worst <= 0.02,
          fmt("min std %.3g >= sqrt(eps_reg) %.3g; Monte-Carlo (1e5 draws) max relative gap %.4f (limit 0.02)",
              smallest, floor, worst)};
}

// 8 ---------------------------------------------------------------------------

Outcome cup_stacking(const PipelineRun& run) {
  const auto profile = fixture::calibration();
  const auto coupling = CouplingMap::hand13();
  // The two demonstrations share one motion; only their noise differs.
  const auto clean_bytes = fixture::emulate(fixture::grasp_config(11, 0.0), 15.0);
  const Eigen::MatrixXd reference = fixture::record_bytes(clean_bytes, profile, coupling, 15.0).demo.demo.values;
  const auto& model = run.trained.model;
  const Eigen::MatrixXd mean = mean_trajectory(model, reference.rows());

  // Injected noise in rad per joint: raw std through each channel's scale and the coupling weights.
  const double raw_std = 6.0;
  bool mean_ok = run.demos[0].demo.dims() == 13 && run.demos[0].demo.samples() == 3000;
  double worst_ratio = 0.0;
  for (Eigen::Index d = 0; d < model.dims; ++d) {
    double var = 0.0;
    for (std::size_t c = 0; c < kNumChannels; ++c) {
      const auto& ch = profile.channels[c];
      const double scale = (ch.joint_max - ch.joint_min) / (ch.raw_max - ch.raw_min);
      const double w = coupling.weights()(d, Eigen::Index(c));
      var += w * w * raw_std * raw_std * scale * scale;
    }
    const double rmse = std::sqrt((mean.col(d) - reference.col(d)).squaredNorm() / double(reference.rows()));
    worst_ratio = std::max(worst_ratio, rmse / std::sqrt(var));
    mean_ok &= rmse < std::sqrt(var);
  }
  const double tracking = run.tracking.rmse.maxCoeff();
  const bool pass = mean_ok && tracking < 0.05 && run.seconds < 30.0;
  return {pass, fmt("learned-mean RMSE / injected noise std <= %.3f (need < 1); tracking RMSE max %.4f rad "
                    "(limit 0.05); pipeline %.2f s (limit 30 s)",
                    worst_ratio, tracking, run.seconds)};
}

// 9 ---------------------------------------------------------------------------

Outcome band_coverage(const PipelineRun& run) {
  return {run.eval.overall_coverage >= 0.95,
          fmt("%.4f of training samples inside +/-2 std (need >= 0.95)", run.eval.overall_coverage)};
}

// 10 --------------------------------------------------------------------------

std::vector<std::pair<std::string, std::string>> write_outputs(const PipelineRun& run,
                                                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::pair<std::string, std::string>> files;
  for (std::size_t i = 0; i < run.demos.size(); ++i) {
    const auto name = "demo" + std::to_string(i + 1) + ".csv";
    save_demo(dir / name, run.demos[i]);
    files.emplace_back(name, "");
  }
  save_model(dir / "model.promp", run.trained.model);
  files.emplace_back("model.promp", "");
  const auto labels = model_labels(run.trained.model);
  {
    std::ofstream out(dir / "tracking.csv");
    write_tracking_csv(out, run.tracking, labels);
    std::ofstream eval(dir / "eval.csv");
    write_eval_csv(eval, run.trained.model, run.demos);
    std::ofstream report(dir / "eval.txt");
    write_eval_report(report, run.eval);
  }
  files.emplace_back("tracking.csv", "");
  files.emplace_back("eval.csv", "");
  files.emplace_back("eval.txt", "");
  for (auto& [name, text] : files) {
    std::ifstream in(dir / name, std::ios::binary);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  return files;
}

Outcome determinism(const PipelineRun& first) {
  const auto second = run_pipeline();
  const auto root = std::filesystem::temp_directory_path() / ("glovelearn_acceptance_" + std::to_string(::getpid()));
  const auto a = write_outputs(first, root / "a");
  const auto b = write_outputs(second, root / "b");
  std::filesystem::remove_all(root);
  std::size_t same = 0;
  std::string differing;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].second == b[i].second && !a[i].second.empty()) {
      ++same;
    } else {
      differing += " " + a[i].first;
    }
  }
  return {same == a.size(), fmt("%.0f of %.0f output files byte-identical across two runs", double(same),
                                double(a.size())) +
                                (differing.empty() ? "" : "; differ:" + differing)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s  %2d  %-26s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "protocol round-trip", protocol_round_trip);
  report(2, "parser throughput", parser_throughput);
  report(3, "regression oracle", regression_oracle);
  report(4, "basis identities", basis_identities);
  report(5, "distribution statistics", distribution_statistics);

  PipelineRun run;
  std::string setup_error;
  try {
    run = run_pipeline();
  } catch (const std::exception& e) {
    setup_error = e.what();
  }
  auto with_run = [&](Outcome (*check)(const PipelineRun&)) {
    return [&, check]() -> Outcome {
      if (!setup_error.empty()) return {false, "pipeline failed: " + setup_error};
      return check(run);
    };
  };
  report(6, "linearity", with_run(linearity));
  report(7, "variance sanity", with_run(variance_sanity));
  report(8, "cup-stacking analog", with_run(cup_stacking));
  report(9, "band coverage", with_run(band_coverage));
  report(10, "determinism", with_run(determinism));

  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
