#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "cmpopt/links.hpp"
#include "cmpopt/oracle.hpp"
#include "cmpopt/rng.hpp"

namespace cmpopt {

/// Geometric truncation law P(M = m) = (1 - beta) beta^{m-1}, m >= 1.
struct TruncationSchedule {
  double beta = 0.5;

  /// q_m = P(M >= m) = beta^{m-1}.
  double survival(std::int64_t m) const;
  double expected_m() const { return 1.0 / (1.0 - beta); }
};

/// Inverse-transform draw of M from a single uniform.
std::int64_t sample_truncation(const TruncationSchedule& schedule, Rng& rng);

struct GapEstimate {
  double value = 0.0;
  std::int64_t comparisons_used = 0;
  std::int64_t truncation_m = 0;
};

enum class EstimatorPath { Logistic, General };

/// Everything the roulette estimator needs. The path follows from the series basis:
/// AllDegrees selects the exact logit series (c_m = 1/m, never truncated), OddDegrees the
/// fitted odd-degree coefficients.
struct EstimatorConfig {
  LinkSpec link;
  CoefficientSeries series;
  TruncationSchedule schedule;
  OperatedInterval interval;

  EstimatorPath path() const {
    return series.basis == SeriesBasis::AllDegrees ? EstimatorPath::Logistic : EstimatorPath::General;
  }
};

/// Throws ValidityError when beta does not give finite variance: beta > alpha on the logistic
/// path, beta > alpha^2 rho^2 on the general path. Throws InvalidArgument on link/series mismatch.
void validate(const EstimatorConfig& config);

/// tau * sum_{m<=M} (A_m - B_m) / (m q_m), one fresh m-block per term; N = M(M+1)/2.
GapEstimate estimate_gap_logistic(const EstimatorConfig& config, ComparisonOracle& oracle,
                                  const Eigen::VectorXd& x_minus, const Eigen::VectorXd& x_plus, Rng& rng);

/// tau * sum_{k<=M} c_{2k-1} (A_{2k-1} - B_{2k-1}) / q_k; N = M^2. Blocks past the stored
/// coefficients are still drawn (their coefficient is zero) so the cost law does not depend on K.
GapEstimate estimate_gap_general(const EstimatorConfig& config, ComparisonOracle& oracle,
                                 const Eigen::VectorXd& x_minus, const Eigen::VectorXd& x_plus, Rng& rng);

/// Dispatches on config.path().
GapEstimate estimate_gap(const EstimatorConfig& config, ComparisonOracle& oracle, const Eigen::VectorXd& x_minus,
                         const Eigen::VectorXd& x_plus, Rng& rng);

/// Midpoint of the feasible beta range: (1 + alpha)/2 without a series, (1 + alpha^2 rho^2)/2
/// with one. Throws ValidityError if alpha^2 rho^2 >= 1.
double default_beta(const OperatedInterval& interval, const CoefficientSeries* series = nullptr);

/// E[N]: 1/(1-beta)^2 on the logistic path, (1+beta)/(1-beta)^2 on the general path.
double predicted_cost(const TruncationSchedule& schedule, EstimatorPath path);

/// Logistic config for gap bound B. beta defaults to the midpoint rule.
EstimatorConfig make_logistic_config(double tau, double gap_bound, std::optional<double> beta = std::nullopt);

/// Fits the odd-degree series for the link on the interval of B and picks beta.
EstimatorConfig make_general_config(const LinkSpec& link, double gap_bound, double tolerance, int max_terms,
                                    std::optional<double> beta = std::nullopt);

/// Config for any link: logistic takes the exact series, others the fitted one.
EstimatorConfig make_config(const LinkSpec& link, double gap_bound, double tolerance, int max_terms,
                            std::optional<double> beta = std::nullopt);

}  // namespace cmpopt
