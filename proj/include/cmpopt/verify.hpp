#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmpopt/estimator.hpp"
#include "cmpopt/objectives.hpp"
#include "cmpopt/smoothing.hpp"

namespace cmpopt {

enum class ToleranceRule {
  FourSigma,        ///< |estimate - target| <= 4 se + bias_allowance
  RelativePercent,  ///< |estimate - target| <= percent/100 * |target|
  SlopeWindow,      ///< lo <= estimate <= hi
  AtMost,           ///< estimate <= target + 4 se
};

struct MonteCarloCheck {
  std::string name;
  std::int64_t n = 0;
  double estimate = 0.0;
  double se = 0.0;
  double target = 0.0;
  ToleranceRule rule = ToleranceRule::FourSigma;
  double percent = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double bias_allowance = 0.0;
  /// "analytic", "closed-form" or "mc-oracle".
  std::string provenance;

  bool passed() const;
  /// e.g. "four_sigma", "relative_percent(2)", "slope_window(1.8,2.2)", "at_most".
  std::string rule_label() const;
};

/// Master seed and worker count. Workers only change wall time, never results.
struct VerifyContext {
  std::uint64_t seed = 0;
  int workers = 1;
};

/// One FourSigma row per gap: mean of gap_hat against the true gap. Fitted links carry a bias
/// allowance of tau * sup_residual. Every gap must satisfy |gap| <= B of the config.
std::vector<MonteCarloCheck> check_unbiasedness(const EstimatorConfig& config, const std::vector<double>& gaps,
                                                std::int64_t n, const VerifyContext& ctx, const std::string& label);

/// Empirical mean of N(M) (M(M+1)/2 or M^2) against predicted_cost, RelativePercent(2).
MonteCarloCheck check_cost(const TruncationSchedule& schedule, EstimatorPath path, std::int64_t n,
                           const VerifyContext& ctx);

struct SecondMomentPoint {
  double gap_bound = 0.0;
  double tau = 0.0;
  double second_moment = 0.0;
  double se = 0.0;
};

struct SecondMomentScaling {
  MonteCarloCheck slope;
  /// max over the grid of E[gap_hat^2] / B^2.
  double c_delta = 0.0;
  std::vector<SecondMomentPoint> points;
};

/// E[gap_hat^2] at the worst-case gap Delta = B with tau = tau_ratio * B, over a geometric B grid
/// of at least 4 points; SlopeWindow(1.8, 2.2) on the log-log least-squares slope.
/// Throws ConfigError if beta is not valid on every grid point.
SecondMomentScaling check_second_moment_scaling(LinkKind link, const std::vector<double>& gap_grid, double beta,
                                                std::int64_t n, const VerifyContext& ctx, double tau_ratio = 0.5,
                                                double tolerance = 1e-8, int max_terms = 512);

struct SeriesSums {
  double s1 = 0.0;
  double s2 = 0.0;
  double tail_ratio = 0.0;
  double bound = 0.0;  ///< second-moment bound at |gap| <= B
};

/// Deterministic sums for the config. Logistic: the (p^m + (1-p)^m)/(m^2 q_m) and /(m q_m) sums;
/// general: S_1, S_2 over the stored coefficients. Throws ValidityError if the tail ratio is >= 1.
SeriesSums series_sums(const EstimatorConfig& config);

/// AtMost row: empirical E[gap_hat^2] at gap = B against the series bound.
MonteCarloCheck check_series_bounds(const EstimatorConfig& config, std::int64_t n, const VerifyContext& ctx,
                                    const std::string& label);

/// Componentwise FourSigma rows for the mean comparison-based gradient sample at each point.
/// Targets: the closed-form smoothed gradient when known, else a value-based reference with the
/// same n (standard errors combined).
std::vector<MonteCarloCheck> check_gradient_unbiasedness(const Objective& objective, const EstimatorConfig& config,
                                                         const std::vector<Eigen::VectorXd>& points,
                                                         const SmoothingParams& params, std::int64_t n,
                                                         const VerifyContext& ctx, const std::string& label);

struct SuiteOptions {
  std::int64_t replicates = 1000000;
  std::int64_t gradient_replicates = 100000;
};

struct SuiteResult {
  std::vector<MonteCarloCheck> checks;
  double certified_c_delta = 0.0;
};

/// The core suite: unbiasedness (three links), cost (both paths), second-moment slope,
/// series bounds, gradient unbiasedness. 31 rows, each at 4 sigma where statistical; the union
/// bound puts the simultaneous false-alarm rate under 31 * 6.3e-5 < 0.01.
SuiteResult run_core_suite(const VerifyContext& ctx, const SuiteOptions& options = {});

}  // namespace cmpopt
