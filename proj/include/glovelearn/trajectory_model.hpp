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

// Probabilistic movement model.
//
// A demonstration y_{1:T} (T x D joint angles) is explained per joint d by
// y_{t,d} = phi(t)^T w_d + eps, with phi the K normalized Gaussian features
// of the movement phase t in [0, 1]. Each demonstration gets a ridge
// estimate W = (Phi^T Phi + lambda I)^-1 Phi^T Y; the prior over the stacked
// weights vec(W) is the sample mean and covariance over demonstrations.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace glovelearn {

inline constexpr double kDefaultCovarianceReg = 1e-8;  // rad^2

struct BasisConfig {
  int num_basis = 20;
  double width = 1.0 / 19.0;  // phase units
  double ridge = 1e-6;
  bool normalize = true;
  std::vector<double> centers;  // strictly increasing, in [0, 1]

  /// K centers evenly spaced over [0, 1] including both endpoints (0.5 when K = 1).
  /// A non-positive width selects the neighbour spacing 1/(K-1) (1 when K = 1).
  static BasisConfig evenly_spaced(int num_basis, double width = 0.0, double ridge = 1e-6,
                                   bool normalize = true);

  /// Throws InvalidArgument if K < 1, width <= 0, ridge < 0 or the centers are not strictly increasing.
  void validate() const;
};

/// Phase of sample i in a T-sample movement: i / (T - 1).
double sample_phase(Eigen::Index i, Eigen::Index num_samples);

/// Feature vector at one phase. Throws InvalidArgument unless 0 <= phase <= 1.
Eigen::VectorXd basis_row(double phase, const BasisConfig& config);

/// T x K feature matrix at phases i / (T - 1).
Eigen::MatrixXd basis_matrix(Eigen::Index num_samples, const BasisConfig& config);

struct Demonstration {
  Eigen::MatrixXd values;  // T x D, rad
  double dt = 0.005;       // s

  Eigen::Index samples() const { return values.rows(); }
  Eigen::Index dims() const { return values.cols(); }
  void validate() const;
};

/// K x D basis weights; column d belongs to joint d.
struct WeightMatrix {
  Eigen::MatrixXd w;

  /// Column-major stacking: entry d*K + k holds w(k, d).
  Eigen::VectorXd stacked() const;
};

/// Per-joint ridge least squares sharing one factorization of Phi^T Phi + lambda I.
/// Throws SingularSystem if that matrix is numerically singular (reciprocal condition < 1e-12).
WeightMatrix fit_weights(const Demonstration& demo, const BasisConfig& config);

struct WeightDistribution {
  Eigen::VectorXd mean;        // K*D
  Eigen::MatrixXd covariance;  // (K*D) x (K*D), includes cov_reg * I
};

/// Sample mean and unbiased sample covariance (divisor N - 1) plus cov_reg * I;
/// a single sample yields cov_reg * I. Throws ShapeMismatch on differing shapes.
WeightDistribution fit_distribution(std::span<const WeightMatrix> weights,
                                    double cov_reg = kDefaultCovarianceReg);

/// Diagonal of Sigma_y: per joint, sum of squared residuals over all demos
/// and samples divided by (total samples - 1), floored at `floor`.
Eigen::VectorXd estimate_noise(std::span<const Demonstration> demos, std::span<const WeightMatrix> weights,
                               const BasisConfig& config, double floor = kDefaultCovarianceReg);

struct TrajectoryModel {
  BasisConfig basis;
  Eigen::Index dims = 0;
  Eigen::VectorXd mean_w;     // K*D
  Eigen::MatrixXd cov_w;      // (K*D) x (K*D)
  Eigen::VectorXd noise_var;  // D, diagonal of Sigma_y
  double cov_reg = kDefaultCovarianceReg;
  double dt = 0.005;
  std::vector<std::string> labels;

  Eigen::Index num_basis() const { return basis.num_basis; }
  /// Mean weights as a K x D matrix.
  Eigen::MatrixXd mean_weights() const;
  void validate() const;
};

struct TrainOptions {
  BasisConfig basis = BasisConfig::evenly_spaced(20);
  double cov_reg = kDefaultCovarianceReg;
  /// Fixed Sigma_y diagonal value (rad^2) instead of the residual estimate.
  std::optional<double> noise_var_override;
};

/// fit_weights per demonstration, then fit_distribution and estimate_noise.
TrajectoryModel train_model(std::span<const Demonstration> demos, const TrainOptions& options,
                            std::vector<WeightMatrix>* per_demo_weights = nullptr);

/// Row i is Phi(t_i) mu_w, t_i = i / (T - 1).
Eigen::MatrixXd mean_trajectory(const TrajectoryModel& model, Eigen::Index num_samples);

/// Entry (t, d) is sqrt([Phi_t Sigma_w Phi_t^T + Sigma_y]_dd).
Eigen::MatrixXd marginal_std(const TrajectoryModel& model, Eigen::Index num_samples);

/// Per-joint sum over t of log N(y_td | [Phi_t mu_w]_d, Sigma_y,dd), in nats.
Eigen::VectorXd log_likelihood_per_joint(const TrajectoryModel& model, const Demonstration& demo);

/// Sum of the per-joint terms. Throws InvalidArgument on a dimension mismatch.
double log_likelihood(const TrajectoryModel& model, const Demonstration& demo);

/// promp-v1, every float with 17 significant digits.
void write_model(std::ostream& out, const TrajectoryModel& model);
TrajectoryModel read_model(std::istream& in);

}  // namespace glovelearn
