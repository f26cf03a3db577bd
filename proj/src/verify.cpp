#include "cmpopt/verify.hpp"

#include <cmath>
#include <fmt/format.h>

#include "cmpopt/errors.hpp"
#include "cmpopt/oracle.hpp"
#include "cmpopt/stats.hpp"

namespace cmpopt {

namespace {

// FNV-1a, so each labelled check gets its own streams.
std::uint64_t label_tag(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct VecAcc {
  std::vector<MeanAccumulator> parts;
  void merge(const VecAcc& o) {
    if (parts.empty()) parts.resize(o.parts.size());
    for (std::size_t i = 0; i < o.parts.size(); ++i) parts[i].merge(o.parts[i]);
  }
};

MeanAccumulator gap_replicates(const EstimatorConfig& config, double gap, bool square, std::int64_t n,
                               const VerifyContext& ctx, std::uint64_t tag, std::uint64_t index) {
  const Objective line = Objective::max_affine(Eigen::MatrixXd::Constant(1, 1, gap), Eigen::VectorXd::Zero(1));
  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(1);
  const Eigen::VectorXd hi = Eigen::VectorXd::Ones(1);
  return run_chunked<MeanAccumulator>(n, ctx.workers, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
    const auto uc = static_cast<std::uint64_t>(c);
    ComparisonOracle oracle(line, config.link, Rng::derive(ctx.seed, Stream::Oracle, {tag, index, uc}));
    Rng trunc = Rng::derive(ctx.seed, Stream::Truncation, {tag, index, uc});
    MeanAccumulator acc;
    for (std::int64_t i = b; i < e; ++i) {
      const double v = estimate_gap(config, oracle, lo, hi, trunc).value;
      acc.add(square ? v * v : v);
    }
    return acc;
  });
}

std::string num(double x) { return fmt::format("{:g}", x); }

}  // namespace

bool MonteCarloCheck::passed() const {
  if (!std::isfinite(estimate)) return false;
  switch (rule) {
    case ToleranceRule::FourSigma:
      return std::abs(estimate - target) <= 4.0 * se + bias_allowance;
    case ToleranceRule::RelativePercent:
      return std::abs(estimate - target) <= percent / 100.0 * std::abs(target);
    case ToleranceRule::SlopeWindow:
      return estimate >= lo && estimate <= hi;
    case ToleranceRule::AtMost:
      return estimate <= target + 4.0 * se;
  }
  return false;
}

std::string MonteCarloCheck::rule_label() const {
  switch (rule) {
    case ToleranceRule::FourSigma:
      return bias_allowance > 0.0 ? fmt::format("four_sigma+{:g}", bias_allowance) : "four_sigma";
    case ToleranceRule::RelativePercent:
      return fmt::format("relative_percent({:g})", percent);
    case ToleranceRule::SlopeWindow:
      return fmt::format("slope_window({:g},{:g})", lo, hi);
    case ToleranceRule::AtMost:
      return "at_most";
  }
  return "unknown";
}

std::vector<MonteCarloCheck> check_unbiasedness(const EstimatorConfig& config, const std::vector<double>& gaps,
                                                std::int64_t n, const VerifyContext& ctx, const std::string& label) {
  validate(config);
  if (n < 2) throw InvalidArgument("check_unbiasedness: need n >= 2");
  const double B = config.interval.gap_bound;
  const std::uint64_t tag = label_tag("unbiased/" + label);
  const double allowance = config.path() == EstimatorPath::General ? config.link.tau * config.series.sup_residual : 0.0;
  std::vector<MonteCarloCheck> out;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (std::abs(gaps[i]) > B * (1.0 + 1e-12))
      throw InvalidArgument(fmt::format("check_unbiasedness: gap {} exceeds B = {}", gaps[i], B));
    const MeanAccumulator acc = gap_replicates(config, gaps[i], false, n, ctx, tag, i);
    MonteCarloCheck c;
    c.name = fmt::format("unbiased[{}] gap={}", label, num(gaps[i]));
    c.n = n;
    c.estimate = acc.mean();
    c.se = acc.standard_error();
    c.target = gaps[i];
    c.rule = ToleranceRule::FourSigma;
    c.bias_allowance = allowance;
    c.provenance = "closed-form";
    out.push_back(c);
  }
  return out;
}

MonteCarloCheck check_cost(const TruncationSchedule& schedule, EstimatorPath path, std::int64_t n,
                           const VerifyContext& ctx) {
  if (!(schedule.beta > 0.0 && schedule.beta < 1.0)) throw InvalidArgument("check_cost: beta must lie in (0, 1)");
  if (n < 2) throw InvalidArgument("check_cost: need n >= 2");
  const bool logistic = path == EstimatorPath::Logistic;
  const std::uint64_t tag = label_tag(fmt::format("cost/{}/{:.17g}", logistic ? "logistic" : "general", schedule.beta));
  const MeanAccumulator acc =
      run_chunked<MeanAccumulator>(n, ctx.workers, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
        Rng rng = Rng::derive(ctx.seed, Stream::Truncation, {tag, static_cast<std::uint64_t>(c)});
        MeanAccumulator a;
        for (std::int64_t i = b; i < e; ++i) {
          const auto M = static_cast<double>(sample_truncation(schedule, rng));
          a.add(logistic ? M * (M + 1.0) / 2.0 : M * M);
        }
        return a;
      });
  MonteCarloCheck c;
  c.name = fmt::format("cost[{}] beta={}", logistic ? "logistic" : "general", num(schedule.beta));
  c.n = n;
  c.estimate = acc.mean();
  c.se = acc.standard_error();
  c.target = predicted_cost(schedule, path);
  c.rule = ToleranceRule::RelativePercent;
  c.percent = 2.0;
  c.provenance = logistic ? "analytic" : "closed-form";
  return c;
}

SecondMomentScaling check_second_moment_scaling(LinkKind link, const std::vector<double>& gap_grid, double beta,
                                                std::int64_t n, const VerifyContext& ctx, double tau_ratio,
                                                double tolerance, int max_terms) {
  if (gap_grid.size() < 4) throw InvalidArgument("check_second_moment_scaling: need at least 4 grid points");
  for (std::size_t i = 0; i < gap_grid.size(); ++i) {
    if (!(gap_grid[i] > 0.0)) throw InvalidArgument("check_second_moment_scaling: grid must be positive");
    if (i > 0 && !(gap_grid[i] > gap_grid[i - 1]))
      throw InvalidArgument("check_second_moment_scaling: grid must be increasing");
  }
  const std::string lname(to_string(link));
  const std::uint64_t tag = label_tag("moment/" + lname);
  SecondMomentScaling out;
  std::vector<double> xs, ys, vs;
  for (std::size_t i = 0; i < gap_grid.size(); ++i) {
    const double B = gap_grid[i];
    EstimatorConfig cfg;
    try {
      cfg = make_config(LinkSpec{link, tau_ratio * B}, B, tolerance, max_terms, beta);
    } catch (const ValidityError& e) {
      throw ConfigError(fmt::format("beta={} is not valid at B={}: {}", beta, B, e.what()));
    }
    const MeanAccumulator acc = gap_replicates(cfg, B, true, n, ctx, tag, i);
    SecondMomentPoint p{B, cfg.link.tau, acc.mean(), acc.standard_error()};
    out.points.push_back(p);
    out.c_delta = std::max(out.c_delta, p.second_moment / (B * B));
    xs.push_back(std::log(B));
    ys.push_back(std::log(p.second_moment));
    const double rel = p.second_moment > 0.0 ? p.se / p.second_moment : 0.0;
    vs.push_back(rel * rel);
  }
  const double k = static_cast<double>(xs.size());
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xbar += xs[i] / k;
    ybar += ys[i] / k;
  }
  double sxx = 0.0, sxy = 0.0, var = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  for (std::size_t i = 0; i < xs.size(); ++i) var += (xs[i] - xbar) * (xs[i] - xbar) * vs[i];
  MonteCarloCheck& c = out.slope;
  c.name = fmt::format("second_moment_slope[{}]", lname);
  c.n = n;
  c.estimate = sxy / sxx;
  c.se = std::sqrt(var) / sxx;
  c.target = 2.0;
  c.rule = ToleranceRule::SlopeWindow;
  c.lo = 1.8;
  c.hi = 2.2;
  c.provenance = "analytic";
  return out;
}

SeriesSums series_sums(const EstimatorConfig& config) {
  validate(config);
  const double alpha = config.interval.alpha;
  const double beta = config.schedule.beta;
  const double tau = config.link.tau;
  const double B = config.interval.gap_bound;
  SeriesSums s;
  if (config.path() == EstimatorPath::Logistic) {
    s.tail_ratio = alpha / beta;
    if (!(s.tail_ratio < 1.0)) throw ValidityError("series tail ratio alpha/beta >= 1: need beta > alpha");
    // Terms 2 alpha^m / (m^k beta^{m-1}) decay at least geometrically; stop when negligible.
    CompensatedSum a1, a2;
    for (int m = 1; m < 1000000; ++m) {
      const double w = 2.0 * std::exp(m * std::log(alpha) - (m - 1) * std::log(beta));
      a1.add(w / m);
      a2.add(w / (static_cast<double>(m) * m));
      if (w < 1e-18 * a1.value()) break;
    }
    s.s1 = a1.value();
    s.s2 = a2.value();
    s.bound = B * B + tau * tau * s.s2 + tau * tau * s.s1 * s.s1;
    return s;
  }
  const double rho = config.series.decay_rho;
  s.tail_ratio = alpha * alpha * rho * rho / beta;
  if (!(s.tail_ratio < 1.0)) throw ValidityError("series tail ratio alpha^2 rho^2 / beta >= 1: need beta > alpha^2 rho^2");
  CompensatedSum a1, a2;
  const auto& c = config.series.coefficients;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double lq = (k - 1.0) * std::log(beta);
    if (c[i] == 0.0) continue;
    a2.add(std::exp(2.0 * std::log(std::abs(c[i])) - lq + (2.0 * k - 1.0) * std::log(alpha)));
    a1.add(std::exp(std::log(std::abs(c[i])) - 0.5 * lq + (k - 0.5) * std::log(alpha)));
  }
  s.s1 = a1.value();
  s.s2 = a2.value();
  s.bound = B * B + 2.0 * tau * tau * s.s2 + 2.0 * tau * tau * s.s1 * s.s1;
  return s;
}

MonteCarloCheck check_series_bounds(const EstimatorConfig& config, std::int64_t n, const VerifyContext& ctx,
                                    const std::string& label) {
  const SeriesSums s = series_sums(config);
  const double B = config.interval.gap_bound;
  const MeanAccumulator acc = gap_replicates(config, B, true, n, ctx, label_tag("bounds/" + label), 0);
  MonteCarloCheck c;
  c.name = fmt::format("second_moment_bound[{}]", label);
  c.n = n;
  c.estimate = acc.mean();
  c.se = acc.standard_error();
  c.target = s.bound;
  c.rule = ToleranceRule::AtMost;
  c.provenance = "analytic";
  return c;
}

std::vector<MonteCarloCheck> check_gradient_unbiasedness(const Objective& objective, const EstimatorConfig& config,
                                                         const std::vector<Eigen::VectorXd>& points,
                                                         const SmoothingParams& params, std::int64_t n,
                                                         const VerifyContext& ctx, const std::string& label) {
  validate(config);
  params.validate();
  if (n < 2) throw InvalidArgument("check_gradient_unbiasedness: need n >= 2");
  if (objective.dimension() != params.dimension)
    throw InvalidArgument("check_gradient_unbiasedness: objective and smoothing dimensions differ");
  const double need = 2.0 * objective.lipschitz() * params.delta;
  if (config.interval.gap_bound < need * (1.0 - 1e-12))
    throw InvalidArgument(fmt::format("estimator interval B={} is below 2 L delta = {}", config.interval.gap_bound, need));
  const int d = params.dimension;
  const std::uint64_t tag = label_tag("gradient/" + label);
  std::vector<MonteCarloCheck> out;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const Eigen::VectorXd& x = points[pi];
    const VecAcc acc = run_chunked<VecAcc>(n, ctx.workers, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
      const auto uc = static_cast<std::uint64_t>(c);
      ComparisonOracle oracle(objective, config.link, Rng::derive(ctx.seed, Stream::Oracle, {tag, pi, uc}));
      Rng dir = Rng::derive(ctx.seed, Stream::Direction, {tag, pi, uc});
      Rng trunc = Rng::derive(ctx.seed, Stream::Truncation, {tag, pi, uc});
      VecAcc a;
      a.parts.resize(d);
      for (std::int64_t i = b; i < e; ++i) {
        const GradientSample g = gradient_sample(config, oracle, x, params, dir, trunc);
        for (int j = 0; j < d; ++j) a.parts[j].add(g.vector[j]);
      }
      return a;
    });
    Eigen::VectorXd target(d), target_se = Eigen::VectorXd::Zero(d);
    std::string provenance = "closed-form";
    if (auto closed = objective.smoothed_gradient(x, params.delta)) {
      target = *closed;
    } else {
      Rng ref_rng = Rng::derive(ctx.seed, Stream::Diagnostic, {tag, pi});
      const ReferenceGradient ref = reference_smoothed_gradient(objective, x, params, n, ref_rng);
      target = ref.mean;
      target_se = ref.standard_error;
      provenance = "mc-oracle";
    }
    for (int j = 0; j < d; ++j) {
      MonteCarloCheck c;
      c.name = d == 1 ? fmt::format("gradient[{}] x={}", label, num(x[0]))
                      : fmt::format("gradient[{}] point={} component={}", label, pi, j);
      c.n = n;
      c.estimate = acc.parts[j].mean();
      const double se = acc.parts[j].standard_error();
      c.se = std::sqrt(se * se + target_se[j] * target_se[j]);
      c.target = target[j];
      c.rule = ToleranceRule::FourSigma;
      c.provenance = provenance;
      out.push_back(c);
    }
  }
  return out;
}

SuiteResult run_core_suite(const VerifyContext& ctx, const SuiteOptions& options) {
  SuiteResult res;
  auto append = [&res](std::vector<MonteCarloCheck> v) {
    res.checks.insert(res.checks.end(), v.begin(), v.end());
  };
  const std::int64_t n = options.replicates;
  const double tol = 1e-8;
  const int max_terms = 512;

  // Unbiasedness at B / tau = 2 for all three links.
  const std::vector<double> unit_grid{-1.0, -0.5, 0.0, 0.5, 1.0};
  append(check_unbiasedness(make_logistic_config(0.5, 1.0), unit_grid, n, ctx, "logistic"));
  append(check_unbiasedness(make_general_config({LinkKind::Probit, 0.5}, 1.0, tol, max_terms), unit_grid, n, ctx,
                            "probit"));
  append(check_unbiasedness(make_general_config({LinkKind::Cauchit, 0.25}, 0.5, tol, max_terms),
                            {-0.5, -0.3, 0.0, 0.3, 0.5}, n, ctx, "cauchit"));

  for (double beta : {0.5, 0.8, 0.9}) res.checks.push_back(check_cost({beta}, EstimatorPath::Logistic, n, ctx));
  for (double beta : {0.5, 0.8, 0.9}) res.checks.push_back(check_cost({beta}, EstimatorPath::General, n, ctx));

  const double beta_moment = default_beta(interval_for_gap_bound({LinkKind::Logistic, 1.0}, 2.0));
  const SecondMomentScaling sm =
      check_second_moment_scaling(LinkKind::Logistic, {0.1, 0.2, 0.4, 0.8}, beta_moment, n, ctx);
  res.checks.push_back(sm.slope);
  res.certified_c_delta = sm.c_delta;

  res.checks.push_back(check_series_bounds(make_logistic_config(0.5, 1.0), n, ctx, "logistic"));
  res.checks.push_back(
      check_series_bounds(make_general_config({LinkKind::Probit, 0.5}, 1.0, tol, max_terms), n, ctx, "probit"));
  res.checks.push_back(
      check_series_bounds(make_general_config({LinkKind::Cauchit, 0.5}, 1.0, tol, max_terms), n, ctx, "cauchit"));

  const double delta = 0.1;
  const Objective abs = Objective::abs1d();
  const EstimatorConfig abs_cfg = make_logistic_config(delta, 2.0 * delta);
  std::vector<Eigen::VectorXd> abs_points;
  for (double x : {0.0, 0.5 * delta, 2.0 * delta}) abs_points.push_back(Eigen::VectorXd::Constant(1, x));
  append(check_gradient_unbiasedness(abs, abs_cfg, abs_points, {delta, 1}, options.gradient_replicates, ctx, "abs1d"));

  const Objective quad = Objective::smooth_quadratic(3, 3.0);
  const double Bq = 2.0 * quad.lipschitz() * delta;
  const EstimatorConfig quad_cfg = make_logistic_config(0.5 * Bq, Bq);
  Eigen::VectorXd q(3);
  q << 1.0, 2.0, 3.0;
  append(check_gradient_unbiasedness(quad, quad_cfg, {q}, {delta, 3}, options.gradient_replicates, ctx, "quadratic"));
  return res;
}

}  // namespace cmpopt
