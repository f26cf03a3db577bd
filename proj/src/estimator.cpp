#include "cmpopt/estimator.hpp"

#include <cmath>
#include <sstream>

#include "cmpopt/errors.hpp"

namespace cmpopt {

namespace {

constexpr int kLogisticDisplayTerms = 200;

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("truncation parameter beta must lie in (0, 1)");
}

}  // namespace

double TruncationSchedule::survival(std::int64_t m) const {
  return m <= 1 ? 1.0 : std::pow(beta, static_cast<double>(m - 1));
}

std::int64_t sample_truncation(const TruncationSchedule& schedule, Rng& rng) {
  const double u = rng.uniform_open_zero();
  const double lb = std::log(schedule.beta);
  // beta -> 0 gives log(u) / -inf = 0, i.e. M = 1
  const double t = std::log(u) / lb;
  return 1 + static_cast<std::int64_t>(std::floor(t));
}

void validate(const EstimatorConfig& config) {
  check_beta(config.schedule.beta);
  const double alpha = config.interval.alpha;
  const double beta = config.schedule.beta;
  std::ostringstream msg;
  if (config.path() == EstimatorPath::Logistic) {
    if (config.link.kind != LinkKind::Logistic)
      throw InvalidArgument("the exact all-degree series is only valid for the logistic link");
    if (!(beta > alpha)) {
      msg << "invalid truncation: need beta > alpha (beta=" << beta << ", alpha=" << alpha
          << "); otherwise the estimator's second moment is infinite";
      throw ValidityError(msg.str());
    }
    return;
  }
  if (config.series.coefficients.empty()) throw InvalidArgument("odd-degree series has no coefficients");
  if (config.series.fit_interval.p_plus < config.interval.p_plus * (1.0 - 1e-12))
    throw InvalidArgument("series fit interval does not cover the operated interval");
  const double ar = alpha * config.series.decay_rho;
  if (!(beta > ar * ar)) {
    msg << "invalid truncation: need beta > alpha^2 rho^2 (beta=" << beta << ", alpha=" << alpha
        << ", rho=" << config.series.decay_rho << ")";
    throw ValidityError(msg.str());
  }
}

GapEstimate estimate_gap_logistic(const EstimatorConfig& config, ComparisonOracle& oracle,
                                  const Eigen::VectorXd& x_minus, const Eigen::VectorXd& x_plus, Rng& rng) {
  if (config.path() != EstimatorPath::Logistic)
    throw InvalidArgument("estimate_gap_logistic needs the all-degree logistic series");
  validate(config);
  const std::int64_t M = sample_truncation(config.schedule, rng);
  const double log_beta = std::log(config.schedule.beta);
  double sum = 0.0;
  for (std::int64_t m = 1; m <= M; ++m) {
    const int s = oracle.compare_block(x_minus, x_plus, static_cast<int>(m)).signed_indicator();
    if (s == 0) continue;
    // 1 / (m q_m) in log space
    sum += s * std::exp(-std::log(static_cast<double>(m)) - static_cast<double>(m - 1) * log_beta);
  }
  return GapEstimate{config.link.tau * sum, M * (M + 1) / 2, M};
}

GapEstimate estimate_gap_general(const EstimatorConfig& config, ComparisonOracle& oracle,
                                 const Eigen::VectorXd& x_minus, const Eigen::VectorXd& x_plus, Rng& rng) {
  if (config.path() != EstimatorPath::General)
    throw InvalidArgument("estimate_gap_general needs an odd-degree coefficient series");
  validate(config);
  const std::int64_t M = sample_truncation(config.schedule, rng);
  const double log_beta = std::log(config.schedule.beta);
  const auto& c = config.series.coefficients;
  const std::int64_t K = static_cast<std::int64_t>(c.size());
  double sum = 0.0;
  for (std::int64_t k = 1; k <= M; ++k) {
    const int s = oracle.compare_block(x_minus, x_plus, static_cast<int>(2 * k - 1)).signed_indicator();
    if (s == 0 || k > K) continue;
    const double ck = c[k - 1];
    if (ck == 0.0) continue;
    const double w = std::exp(std::log(std::abs(ck)) - static_cast<double>(k - 1) * log_beta);
    sum += (ck < 0.0 ? -s : s) * w;
  }
  return GapEstimate{config.link.tau * sum, M * M, M};
}

GapEstimate estimate_gap(const EstimatorConfig& config, ComparisonOracle& oracle, const Eigen::VectorXd& x_minus,
                         const Eigen::VectorXd& x_plus, Rng& rng) {
  return config.path() == EstimatorPath::Logistic ? estimate_gap_logistic(config, oracle, x_minus, x_plus, rng)
                                                  : estimate_gap_general(config, oracle, x_minus, x_plus, rng);
}

double default_beta(const OperatedInterval& interval, const CoefficientSeries* series) {
  const double alpha = interval.alpha;
  if (!(alpha < 1.0)) throw ValidityError("default_beta: operated interval touches probability 1");
  if (series == nullptr || series->basis == SeriesBasis::AllDegrees) return 0.5 * (1.0 + alpha);
  const double ar2 = alpha * alpha * series->decay_rho * series->decay_rho;
  if (!(ar2 < 1.0)) throw ValidityError("default_beta: alpha^2 rho^2 >= 1, no feasible truncation parameter");
  return 0.5 * (1.0 + ar2);
}

double predicted_cost(const TruncationSchedule& schedule, EstimatorPath path) {
  const double b = schedule.beta;
  const double one_minus = 1.0 - b;
  return path == EstimatorPath::Logistic ? 1.0 / (one_minus * one_minus) : (1.0 + b) / (one_minus * one_minus);
}

EstimatorConfig make_logistic_config(double tau, double gap_bound, std::optional<double> beta) {
  EstimatorConfig cfg;
  cfg.link = LinkSpec{LinkKind::Logistic, tau};
  cfg.interval = interval_for_gap_bound(cfg.link, gap_bound);
  cfg.series = logistic_coefficients(kLogisticDisplayTerms, cfg.interval);
  cfg.schedule.beta = beta.value_or(default_beta(cfg.interval));
  validate(cfg);
  return cfg;
}

EstimatorConfig make_general_config(const LinkSpec& link, double gap_bound, double tolerance, int max_terms,
                                    std::optional<double> beta) {
  EstimatorConfig cfg;
  cfg.link = link;
  cfg.interval = interval_for_gap_bound(link, gap_bound);
  cfg.series = fit_odd_coefficients(link.kind, cfg.interval, tolerance, max_terms);
  cfg.schedule.beta = beta.value_or(default_beta(cfg.interval, &cfg.series));
  validate(cfg);
  return cfg;
}

EstimatorConfig make_config(const LinkSpec& link, double gap_bound, double tolerance, int max_terms,
                            std::optional<double> beta) {
  if (link.kind == LinkKind::Logistic) return make_logistic_config(link.tau, gap_bound, beta);
  return make_general_config(link, gap_bound, tolerance, max_terms, beta);
}

}  // namespace cmpopt
