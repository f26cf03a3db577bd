#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "cmpopt/estimator.hpp"
#include "cmpopt/objectives.hpp"
#include "cmpopt/oracle.hpp"
#include "cmpopt/rng.hpp"

namespace cmpopt {

struct SmoothingParams {
  double delta = 0.1;
  int dimension = 1;

  /// Throws InvalidArgument unless delta > 0 and dimension >= 1.
  void validate() const;
  /// d / (2 delta).
  double scale() const { return dimension / (2.0 * delta); }
};

/// Uniform direction on the unit sphere: normalized Gaussian, Rademacher for d = 1.
Eigen::VectorXd sample_sphere(int d, Rng& rng);

struct GradientSample {
  Eigen::VectorXd vector;
  GapEstimate gap;
  Eigen::VectorXd direction;
};

/// G = (d / (2 delta)) * gap_hat(x - delta u, x + delta u) * u with a fresh direction and fresh
/// comparisons. Directions come from `direction_rng`; the gap estimator's truncation draw from
/// `truncation_rng`; comparison outcomes from the oracle's own stream.
GradientSample gradient_sample(const EstimatorConfig& config, ComparisonOracle& oracle, const Eigen::VectorXd& x,
                               const SmoothingParams& params, Rng& direction_rng, Rng& truncation_rng);

struct ReferenceGradient {
  Eigen::VectorXd mean;
  Eigen::VectorXd standard_error;  ///< componentwise
  std::int64_t samples = 0;
};

/// Value-based Monte Carlo of (d / (2 delta)) (f(x + delta u) - f(x - delta u)) u.
/// Uses privileged function values; never touches an oracle.
ReferenceGradient reference_smoothed_gradient(const Objective& objective, const Eigen::VectorXd& x,
                                              const SmoothingParams& params, std::int64_t n_samples, Rng& rng);

}  // namespace cmpopt
