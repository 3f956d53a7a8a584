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

#include "glovelearn/trajectory_model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "glovelearn/errors.hpp"
#include "glovelearn/text_io.hpp"

namespace glovelearn {

BasisConfig BasisConfig::evenly_spaced(int num_basis, double width, double ridge, bool normalize) {
  if (num_basis < 1) throw InvalidArgument("number of basis functions must be >= 1");
  BasisConfig config;
  config.num_basis = num_basis;
  config.ridge = ridge;
  config.normalize = normalize;
  config.centers.resize(static_cast<std::size_t>(num_basis));
  if (num_basis == 1) {
    config.centers[0] = 0.5;
  } else {
    for (int k = 0; k < num_basis; ++k) config.centers[k] = double(k) / double(num_basis - 1);
  }
  config.width = width > 0.0 ? width : (num_basis == 1 ? 1.0 : 1.0 / double(num_basis - 1));
  config.validate();
  return config;
}

void BasisConfig::validate() const {
  if (num_basis < 1) throw InvalidArgument("number of basis functions must be >= 1");
  if (!(width > 0.0) || !std::isfinite(width)) throw InvalidArgument("basis width must be > 0");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw InvalidArgument("ridge must be >= 0");
  if (centers.size() != static_cast<std::size_t>(num_basis)) {
    throw InvalidArgument("expected " + std::to_string(num_basis) + " basis centers, got " +
                          std::to_string(centers.size()));
  }
  for (std::size_t k = 1; k < centers.size(); ++k) {
    if (!(centers[k] > centers[k - 1])) throw InvalidArgument("basis centers must be strictly increasing");
  }
}

double sample_phase(Eigen::Index i, Eigen::Index num_samples) {
  return double(i) / double(num_samples - 1);
}

Eigen::VectorXd basis_row(double phase, const BasisConfig& config) {
  if (!(phase >= 0.0 && phase <= 1.0)) {
    throw InvalidArgument("phase must lie in [0, 1], got " + format_double(phase));
  }
  Eigen::VectorXd row(config.num_basis);
  const double inv_two_h2 = 1.0 / (2.0 * config.width * config.width);
  for (int k = 0; k < config.num_basis; ++k) {
    const double d = phase - config.centers[k];
    row[k] = std::exp(-d * d * inv_two_h2);
  }
  if (config.normalize) row /= row.sum();
  return row;
}

Eigen::MatrixXd basis_matrix(Eigen::Index num_samples, const BasisConfig& config) {
  if (num_samples < 2) throw InvalidArgument("need at least 2 samples");
  Eigen::MatrixXd phi(num_samples, config.num_basis);
  for (Eigen::Index i = 0; i < num_samples; ++i) {
    phi.row(i) = basis_row(sample_phase(i, num_samples), config).transpose();
  }
  return phi;
}

void Demonstration::validate() const {
  if (values.rows() < 2) throw InvalidArgument("demonstration needs T >= 2 samples");
  if (values.cols() < 1) throw InvalidArgument("demonstration needs D >= 1 joints");
  if (!values.allFinite()) throw InvalidArgument("demonstration contains non-finite values");
  if (!(dt > 0.0)) throw InvalidArgument("demonstration dt must be > 0");
}

Eigen::VectorXd WeightMatrix::stacked() const {
  return Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
}

WeightMatrix fit_weights(const Demonstration& demo, const BasisConfig& config) {
  demo.validate();
  config.validate();
  const Eigen::MatrixXd phi = basis_matrix(demo.samples(), config);

  Eigen::MatrixXd gram = phi.transpose() * phi;
  gram.diagonal().array() += config.ridge;
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success || !(llt.rcond() >= 1e-12)) {
    throw SingularSystem("Phi^T Phi + lambda I is numerically singular (lambda = " +
                         format_double(config.ridge) + "); increase the ridge or reduce K");
  }
  return {llt.solve(phi.transpose() * demo.values)};
}

WeightDistribution fit_distribution(std::span<const WeightMatrix> weights, double cov_reg) {
  if (weights.empty()) throw InvalidArgument("fit_distribution needs at least one weight matrix");
  if (!(cov_reg >= 0.0)) throw InvalidArgument("covariance regularizer must be >= 0");
  const Eigen::Index rows = weights.front().w.rows();
  const Eigen::Index cols = weights.front().w.cols();
  for (const auto& w : weights) {
    if (w.w.rows() != rows || w.w.cols() != cols) {
      throw ShapeMismatch("weight matrices differ in shape: " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " vs " + std::to_string(w.w.rows()) + "x" +
                          std::to_string(w.w.cols()));
    }
  }

  const auto n = static_cast<Eigen::Index>(weights.size());
  const Eigen::Index dim = rows * cols;

  // Shifted by the first sample so identical inputs reproduce it bit-exactly.
  const Eigen::VectorXd origin = weights.front().stacked();
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(dim);
  for (const auto& w : weights) shift += w.stacked() - origin;
  shift /= double(n);

  WeightDistribution dist;
  dist.mean = origin + shift;
  dist.covariance = Eigen::MatrixXd::Zero(dim, dim);
  if (n > 1) {
    for (const auto& w : weights) {
      const Eigen::VectorXd dev = (w.stacked() - origin) - shift;
      dist.covariance.selfadjointView<Eigen::Lower>().rankUpdate(dev);
    }
    dist.covariance = dist.covariance.selfadjointView<Eigen::Lower>();
    dist.covariance /= double(n - 1);
  }
  dist.covariance.diagonal().array() += cov_reg;
  return dist;
}

Eigen::VectorXd estimate_noise(std::span<const Demonstration> demos, std::span<const WeightMatrix> weights,
                               const BasisConfig& config, double floor) {
  if (demos.size() != weights.size() || demos.empty()) {
    throw ShapeMismatch("need one weight matrix per demonstration");
  }
  const Eigen::Index dims = demos.front().dims();
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(dims);
  Eigen::Index total = 0;
  for (std::size_t i = 0; i < demos.size(); ++i) {
    if (demos[i].dims() != dims || weights[i].w.cols() != dims || weights[i].w.rows() != config.num_basis) {
      throw ShapeMismatch("demonstration/weight shapes disagree");
    }
    const Eigen::MatrixXd residual = demos[i].values - basis_matrix(demos[i].samples(), config) * weights[i].w;
    sum_sq += residual.colwise().squaredNorm().transpose();
    total += demos[i].samples();
  }
  return (sum_sq / double(total - 1)).cwiseMax(floor);
}

Eigen::MatrixXd TrajectoryModel::mean_weights() const {
  return Eigen::Map<const Eigen::MatrixXd>(mean_w.data(), basis.num_basis, dims);
}

void TrajectoryModel::validate() const {
  basis.validate();
  const Eigen::Index dim = basis.num_basis * dims;
  if (dims < 1 || mean_w.size() != dim || cov_w.rows() != dim || cov_w.cols() != dim ||
      noise_var.size() != dims) {
    throw ShapeMismatch("trajectory model arrays do not match K=" + std::to_string(basis.num_basis) +
                        ", D=" + std::to_string(dims));
  }
  if (!labels.empty() && labels.size() != static_cast<std::size_t>(dims)) {
    throw ShapeMismatch("trajectory model needs one label per joint");
  }
  if (!mean_w.allFinite() || !cov_w.allFinite() || !noise_var.allFinite() || (noise_var.array() < 0.0).any()) {
    throw InvalidArgument("trajectory model has non-finite or negative entries");
  }
}

TrajectoryModel train_model(std::span<const Demonstration> demos, const TrainOptions& options,
                            std::vector<WeightMatrix>* per_demo_weights) {
  if (demos.empty()) throw InvalidArgument("training needs at least one demonstration");
  const Eigen::Index dims = demos.front().dims();
  for (const auto& demo : demos) {
    if (demo.dims() != dims) throw ShapeMismatch("demonstrations disagree on the number of joints");
  }

  std::vector<WeightMatrix> weights;
  weights.reserve(demos.size());
  for (const auto& demo : demos) weights.push_back(fit_weights(demo, options.basis));

  const WeightDistribution dist = fit_distribution(weights, options.cov_reg);

  TrajectoryModel model;
  model.basis = options.basis;
  model.dims = dims;
  model.mean_w = dist.mean;
  model.cov_w = dist.covariance;
  model.cov_reg = options.cov_reg;
  model.dt = demos.front().dt;
  if (options.noise_var_override) {
    model.noise_var = Eigen::VectorXd::Constant(dims, std::max(*options.noise_var_override, options.cov_reg));
  } else {
    model.noise_var = estimate_noise(demos, weights, options.basis, options.cov_reg);
  }
  if (per_demo_weights != nullptr) *per_demo_weights = std::move(weights);
  return model;
}

Eigen::MatrixXd mean_trajectory(const TrajectoryModel& model, Eigen::Index num_samples) {
  return basis_matrix(num_samples, model.basis) * model.mean_weights();
}

Eigen::MatrixXd marginal_std(const TrajectoryModel& model, Eigen::Index num_samples) {
  const Eigen::MatrixXd phi = basis_matrix(num_samples, model.basis);
  const Eigen::Index k = model.basis.num_basis;
  Eigen::MatrixXd out(num_samples, model.dims);
  for (Eigen::Index d = 0; d < model.dims; ++d) {
    const auto block = model.cov_w.block(d * k, d * k, k, k);
    const Eigen::VectorXd quad = (phi * block).cwiseProduct(phi).rowwise().sum();
    out.col(d) = (quad.cwiseMax(0.0).array() + model.noise_var[d]).sqrt();
  }
  return out;
}

Eigen::VectorXd log_likelihood_per_joint(const TrajectoryModel& model, const Demonstration& demo) {
  if (demo.dims() != model.dims) {
    throw InvalidArgument("demonstration has " + std::to_string(demo.dims()) + " joints, model has " +
                          std::to_string(model.dims));
  }
  demo.validate();
  const Eigen::MatrixXd residual = demo.values - mean_trajectory(model, demo.samples());
  const double t = double(demo.samples());
  Eigen::VectorXd out(model.dims);
  for (Eigen::Index d = 0; d < model.dims; ++d) {
    const double var = model.noise_var[d];
    out[d] = -0.5 * (t * std::log(2.0 * std::numbers::pi * var) + residual.col(d).squaredNorm() / var);
  }
  return out;
}

double log_likelihood(const TrajectoryModel& model, const Demonstration& demo) {
  return log_likelihood_per_joint(model, demo).sum();
}

namespace {

void write_vector(std::ostream& out, const char* key, const Eigen::VectorXd& v) {
  out << key;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << format_double(v[i]);
  out << '\n';
}

std::vector<std::string_view> keyed_line(std::istream& in, std::string& line, std::string_view key) {
  if (!next_line(in, line)) throw ParseError("promp-v1: missing '" + std::string(key) + "' line");
  auto fields = split_whitespace(line);
  if (fields.empty() || fields[0] != key) {
    throw ParseError("promp-v1: expected '" + std::string(key) + "', got '" + line + "'");
  }
  fields.erase(fields.begin());
  return fields;
}

std::string_view single(const std::vector<std::string_view>& fields, std::string_view key) {
  if (fields.size() != 1) throw ParseError("promp-v1: '" + std::string(key) + "' takes one value");
  return fields[0];
}

Eigen::VectorXd read_vector(std::istream& in, std::string& line, std::string_view key, Eigen::Index size) {
  const auto fields = keyed_line(in, line, key);
  if (static_cast<Eigen::Index>(fields.size()) != size) {
    throw ParseError("promp-v1: '" + std::string(key) + "' needs " + std::to_string(size) + " values, got " +
                     std::to_string(fields.size()));
  }
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = parse_double(fields[i], key);
  return v;
}

}  // namespace

void write_model(std::ostream& out, const TrajectoryModel& model) {
  out << "promp-v1\n";
  out << "K " << model.basis.num_basis << '\n';
  out << "D " << model.dims << '\n';
  out << "width " << format_double(model.basis.width) << '\n';
  out << "ridge " << format_double(model.basis.ridge) << '\n';
  out << "eps_reg " << format_double(model.cov_reg) << '\n';
  out << "normalize " << (model.basis.normalize ? 1 : 0) << '\n';
  out << "dt " << format_double(model.dt) << '\n';
  out << "labels";
  for (const auto& label : model.labels) out << ' ' << label;
  out << '\n';
  write_vector(out, "centers", Eigen::Map<const Eigen::VectorXd>(model.basis.centers.data(),
                                                                  model.basis.num_basis));
  write_vector(out, "mu_w", model.mean_w);
  out << "sigma_w " << model.cov_w.rows() << '\n';
  for (Eigen::Index r = 0; r < model.cov_w.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.cov_w.cols(); ++c) {
      if (c > 0) out << ' ';
      out << format_double(model.cov_w(r, c));
    }
    out << '\n';
  }
  write_vector(out, "sigma_y", model.noise_var);
}

TrajectoryModel read_model(std::istream& in) {
  expect_header(in, "promp-v1");
  std::string line;
  TrajectoryModel model;
  const long long k = parse_integer(single(keyed_line(in, line, "K"), "K"), "K");
  const long long d = parse_integer(single(keyed_line(in, line, "D"), "D"), "D");
  if (k < 1 || d < 1 || k * d > 100000) throw ParseError("promp-v1: K and D must be positive");
  model.basis.num_basis = static_cast<int>(k);
  model.dims = static_cast<Eigen::Index>(d);
  model.basis.width = parse_double(single(keyed_line(in, line, "width"), "width"), "width");
  model.basis.ridge = parse_double(single(keyed_line(in, line, "ridge"), "ridge"), "ridge");
  model.cov_reg = parse_double(single(keyed_line(in, line, "eps_reg"), "eps_reg"), "eps_reg");
  const long long normalize = parse_integer(single(keyed_line(in, line, "normalize"), "normalize"), "normalize");
  if (normalize != 0 && normalize != 1) throw ParseError("promp-v1: normalize must be 0 or 1");
  model.basis.normalize = normalize == 1;
  model.dt = parse_double(single(keyed_line(in, line, "dt"), "dt"), "dt");
  for (const auto label : keyed_line(in, line, "labels")) model.labels.emplace_back(label);

  const Eigen::VectorXd centers = read_vector(in, line, "centers", model.basis.num_basis);
  model.basis.centers.assign(centers.data(), centers.data() + centers.size());
  const Eigen::Index dim = model.basis.num_basis * model.dims;
  model.mean_w = read_vector(in, line, "mu_w", dim);

  const long long n = parse_integer(single(keyed_line(in, line, "sigma_w"), "sigma_w"), "sigma_w");
  if (n != dim) throw ParseError("promp-v1: sigma_w must be " + std::to_string(dim) + " square");
  model.cov_w.resize(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    if (!next_line(in, line)) throw ParseError("promp-v1: truncated sigma_w");
    const auto fields = split_whitespace(line);
    if (static_cast<Eigen::Index>(fields.size()) != dim) {
      throw ParseError("promp-v1: sigma_w row " + std::to_string(r) + " has " + std::to_string(fields.size()) +
                       " values");
    }
    for (Eigen::Index c = 0; c < dim; ++c) model.cov_w(r, c) = parse_double(fields[c], "sigma_w");
  }
  model.noise_var = read_vector(in, line, "sigma_y", model.dims);
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("promp-v1: ") + e.what());
  } catch (const ShapeMismatch& e) {
    throw ParseError(std::string("promp-v1: ") + e.what());
  }
  return model;
}

}  // namespace glovelearn
