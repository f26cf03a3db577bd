#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cmpopt/estimator.hpp"
#include "cmpopt/objectives.hpp"
#include "cmpopt/smoothing.hpp"

namespace cmpopt {

struct SGDParams {
  std::optional<double> eta;                ///< nullopt = auto
  std::optional<std::int64_t> iterations;   ///< nullopt = auto
  double epsilon = 0.3;
  double delta = 0.1;
  double delta0 = 1.0;   ///< bound on f_delta(x0) - inf f_delta
  double c_delta = 1.0;  ///< second-moment constant: E[gap_hat^2] <= C_Delta B^2
  std::uint64_t seed = 0;
  /// Reject an explicit eta above delta / (L sqrt(d)).
  bool enforce_step_cap = true;
  int trace_points = 1000;
  std::int64_t diagnostic_samples = 100000;
  std::int64_t trace_diagnostic_samples = 2000;
};

/// L_delta = L sqrt(d) / delta.
double smoothed_smoothness(double L, int d, double delta);

/// min{delta / (L sqrt(d)), sqrt(2 Delta0 / (L_delta T (d^2 / (4 delta^2)) C_Delta B^2))}, B = 2 L delta.
double step_size_plan(double L, int d, double delta, std::int64_t T, double delta0, double c_delta);

/// ceil(8 C_Delta d^{5/2} L^3 Delta0 / (delta epsilon^4)). Throws BudgetTooLarge past int64.
std::int64_t iteration_budget(double L, int d, double delta, double epsilon, double delta0, double c_delta);

/// 2 Delta0 / (eta T) + eta L_delta V with V = (d^2 / (4 delta^2)) C_Delta B^2.
double stationarity_bound(double eta, double L, int d, double delta, std::int64_t T, double delta0, double c_delta);

/// The bound at its unconstrained minimizer in eta: 2 sqrt(2 L_delta Delta0 V / T).
double optimal_stationarity_bound(double L, int d, double delta, std::int64_t T, double delta0, double c_delta);

struct ResolvedSGD {
  double eta = 0.0;
  std::int64_t iterations = 0;
  double eta_cap = 0.0;
  double lipschitz = 0.0;
  double smoothness = 0.0;
  double gap_bound = 0.0;
  bool eta_auto = false;
  bool iterations_auto = false;
};

/// Fills the auto fields. Throws InvalidArgument on non-positive inputs and when an explicit
/// eta exceeds the cap while enforce_step_cap is set.
ResolvedSGD resolve(const SGDParams& sgd, const Objective& objective);

struct TracePoint {
  std::int64_t t = 0;
  Eigen::VectorXd x;
};

struct RunReport {
  Eigen::VectorXd x_R;
  std::int64_t R = 0;
  std::vector<TracePoint> trace;
  std::int64_t total_comparisons = 0;
  double mean_cost_per_iteration = 0.0;
  double predicted_cost = 0.0;

  /// ||reference_smoothed_gradient(x_R)|| and its delta-method standard error.
  double stationarity = 0.0;
  double stationarity_se = 0.0;
  /// Mean of ||grad f_delta|| over the trace points (closed form when known).
  double trace_stationarity = 0.0;

  /// (1/T) sum_t ||grad f_delta(x_t)||^2 from the closed form; NaN when none exists.
  double mean_sq_smoothed_gradient = 0.0;
  /// (1/T) sum_t ||G_t||^2.
  double mean_sq_gradient_sample = 0.0;

  SGDParams params;
  ResolvedSGD resolved;
  EstimatorConfig estimator;
};

/// Comparison-SGD on f_delta: x_{t+1} = x_t - eta G_t for t < T, output x_R with R uniform on
/// {0, ..., T-1}. The gap estimator's interval must cover B = 2 L delta.
///
/// Only comparisons drive the iterates. The stationarity fields are computed afterwards from
/// function values on a separate stream. Throws RunFailure on a non-finite iterate.
RunReport run(const Objective& objective, const SGDParams& sgd, const EstimatorConfig& config,
              const Eigen::VectorXd& x0);

/// ||m|| and sqrt(sum_j (m_j / ||m||)^2 se_j^2).
std::pair<double, double> norm_with_se(const Eigen::VectorXd& mean, const Eigen::VectorXd& se);

}  // namespace cmpopt
