#include "cmpopt/optimizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "cmpopt/errors.hpp"
#include "cmpopt/oracle.hpp"
#include "cmpopt/stats.hpp"

namespace cmpopt {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be positive and finite");
}

double variance_proxy(double L, int d, double delta, double c_delta) {
  const double B = 2.0 * L * delta;
  return (d * d) / (4.0 * delta * delta) * c_delta * B * B;
}

}  // namespace

double smoothed_smoothness(double L, int d, double delta) { return L * std::sqrt(static_cast<double>(d)) / delta; }

double step_size_plan(double L, int d, double delta, std::int64_t T, double delta0, double c_delta) {
  require_positive(L, "L");
  require_positive(delta, "delta");
  require_positive(delta0, "Delta0");
  require_positive(c_delta, "C_Delta");
  if (d < 1 || T < 1) throw InvalidArgument("step_size_plan: d and T must be >= 1");
  const double Ld = smoothed_smoothness(L, d, delta);
  const double second = std::sqrt(2.0 * delta0 / (Ld * static_cast<double>(T) * variance_proxy(L, d, delta, c_delta)));
  return std::min(1.0 / Ld, second);
}

std::int64_t iteration_budget(double L, int d, double delta, double epsilon, double delta0, double c_delta) {
  require_positive(L, "L");
  require_positive(delta, "delta");
  require_positive(epsilon, "epsilon");
  require_positive(delta0, "Delta0");
  require_positive(c_delta, "C_Delta");
  if (d < 1) throw InvalidArgument("iteration_budget: d must be >= 1");
  const double T = 8.0 * c_delta * std::pow(static_cast<double>(d), 2.5) * L * L * L * delta0 /
                   (delta * std::pow(epsilon, 4));
  const double c = std::ceil(T);
  if (!(c < 9.2e18)) {
    std::ostringstream msg;
    msg << "iteration budget " << T << " does not fit in a 64-bit counter";
    throw BudgetTooLarge(msg.str(), T);
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(c));
}

double stationarity_bound(double eta, double L, int d, double delta, std::int64_t T, double delta0, double c_delta) {
  const double Ld = smoothed_smoothness(L, d, delta);
  return 2.0 * delta0 / (eta * static_cast<double>(T)) + eta * Ld * variance_proxy(L, d, delta, c_delta);
}

double optimal_stationarity_bound(double L, int d, double delta, std::int64_t T, double delta0, double c_delta) {
  const double Ld = smoothed_smoothness(L, d, delta);
  return 2.0 * std::sqrt(2.0 * Ld * delta0 * variance_proxy(L, d, delta, c_delta) / static_cast<double>(T));
}

ResolvedSGD resolve(const SGDParams& sgd, const Objective& objective) {
  require_positive(sgd.delta, "delta");
  require_positive(sgd.epsilon, "epsilon");
  require_positive(sgd.delta0, "Delta0");
  require_positive(sgd.c_delta, "C_Delta");
  const double L = objective.lipschitz();
  if (!(L >= 0.0) || !std::isfinite(L)) throw InvalidArgument("objective Lipschitz constant must be finite");
  // A constant objective (L = 0) has no step cap and no budget; eta and T must then be given.
  if (L == 0.0 && !(sgd.eta && sgd.iterations))
    throw InvalidArgument("objective is constant (L = 0): eta and T cannot be chosen automatically");
  const int d = objective.dimension();
  ResolvedSGD r;
  r.lipschitz = L;
  r.smoothness = smoothed_smoothness(L, d, sgd.delta);
  r.gap_bound = 2.0 * L * sgd.delta;
  r.eta_cap = L > 0.0 ? 1.0 / r.smoothness : std::numeric_limits<double>::infinity();
  r.iterations_auto = !sgd.iterations.has_value();
  r.iterations = sgd.iterations ? *sgd.iterations
                                : iteration_budget(L, d, sgd.delta, sgd.epsilon, sgd.delta0, sgd.c_delta);
  if (r.iterations < 1) throw InvalidArgument("iteration count T must be >= 1");
  r.eta_auto = !sgd.eta.has_value();
  if (sgd.eta) {
    require_positive(*sgd.eta, "eta");
    if (sgd.enforce_step_cap && *sgd.eta > r.eta_cap) {
      std::ostringstream msg;
      msg << "step size eta=" << *sgd.eta << " exceeds delta/(L sqrt(d)) = " << r.eta_cap;
      throw InvalidArgument(msg.str());
    }
    r.eta = *sgd.eta;
  } else {
    r.eta = step_size_plan(L, d, sgd.delta, r.iterations, sgd.delta0, sgd.c_delta);
  }
  return r;
}

std::pair<double, double> norm_with_se(const Eigen::VectorXd& mean, const Eigen::VectorXd& se) {
  const double n = mean.norm();
  if (n == 0.0) return {0.0, se.norm()};
  return {n, (mean.cwiseProduct(se) / n).norm()};
}

RunReport run(const Objective& objective, const SGDParams& sgd, const EstimatorConfig& config,
              const Eigen::VectorXd& x0) {
  if (x0.size() != objective.dimension()) throw InvalidArgument("run: x0 dimension does not match the objective");
  if (!x0.allFinite()) throw InvalidArgument("run: x0 must be finite");
  validate(config);
  const ResolvedSGD res = resolve(sgd, objective);
  if (config.interval.gap_bound < res.gap_bound * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "estimator interval covers gaps up to " << config.interval.gap_bound << " but B = 2 L delta = "
        << res.gap_bound;
    throw InvalidArgument(msg.str());
  }
  const int d = objective.dimension();
  const SmoothingParams sp{sgd.delta, d};
  const std::int64_t T = res.iterations;

  ComparisonOracle oracle(objective, config.link, Rng::derive(sgd.seed, Stream::Oracle));
  Rng directions = Rng::derive(sgd.seed, Stream::Direction);
  Rng truncation = Rng::derive(sgd.seed, Stream::Truncation);
  Rng index_rng = Rng::derive(sgd.seed, Stream::OutputIndex);
  // R is independent of the trajectory, so it can be drawn before the loop.
  const std::int64_t R = static_cast<std::int64_t>(index_rng.below(static_cast<std::uint64_t>(T)));

  RunReport rep;
  rep.params = sgd;
  rep.resolved = res;
  rep.estimator = config;
  rep.R = R;
  const std::int64_t stride = std::max<std::int64_t>(1, (T + sgd.trace_points - 1) / std::max(1, sgd.trace_points));

  const bool closed_form = objective.smoothed_gradient(x0, sgd.delta).has_value();
  CompensatedSum sq_grad, sq_sample;
  Eigen::VectorXd x = x0;
  for (std::int64_t t = 0; t < T; ++t) {
    if (t == R) rep.x_R = x;
    if (t % stride == 0) rep.trace.push_back({t, x});
    if (closed_form) sq_grad.add(objective.smoothed_gradient(x, sgd.delta)->squaredNorm());
    const GradientSample g = gradient_sample(config, oracle, x, sp, directions, truncation);
    sq_sample.add(g.vector.squaredNorm());
    Eigen::VectorXd next = x - res.eta * g.vector;
    if (!next.allFinite()) {
      throw RunFailure("non-finite iterate at step " + std::to_string(t + 1),
                       std::vector<double>(x.data(), x.data() + x.size()), t);
    }
    x = std::move(next);
  }

  rep.total_comparisons = oracle.query_count();
  rep.mean_cost_per_iteration = static_cast<double>(rep.total_comparisons) / static_cast<double>(T);
  rep.predicted_cost = predicted_cost(config.schedule, config.path());
  rep.mean_sq_smoothed_gradient =
      closed_form ? sq_grad.value() / static_cast<double>(T) : std::numeric_limits<double>::quiet_NaN();
  rep.mean_sq_gradient_sample = sq_sample.value() / static_cast<double>(T);

  // Diagnostics below use function values only.
  Rng diag = Rng::derive(sgd.seed, Stream::Diagnostic, {0});
  const ReferenceGradient ref = reference_smoothed_gradient(objective, rep.x_R, sp, sgd.diagnostic_samples, diag);
  std::tie(rep.stationarity, rep.stationarity_se) = norm_with_se(ref.mean, ref.standard_error);

  CompensatedSum trace_norm;
  for (std::size_t i = 0; i < rep.trace.size(); ++i) {
    const auto& tp = rep.trace[i];
    if (closed_form) {
      trace_norm.add(objective.smoothed_gradient(tp.x, sgd.delta)->norm());
    } else {
      Rng r = Rng::derive(sgd.seed, Stream::Diagnostic, {1, i});
      trace_norm.add(reference_smoothed_gradient(objective, tp.x, sp, sgd.trace_diagnostic_samples, r).mean.norm());
    }
  }
  rep.trace_stationarity = rep.trace.empty() ? 0.0 : trace_norm.value() / static_cast<double>(rep.trace.size());
  return rep;
}

}  // namespace cmpopt
