#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "cmpopt/errors.hpp"
#include "cmpopt/stats.hpp"
#include "cmpopt/verify.hpp"

using namespace cmpopt;

TEST(Check, RulesArePureFunctions) {
  MonteCarloCheck c;
  c.estimate = 1.0;
  c.se = 0.1;
  c.target = 1.35;
  c.rule = ToleranceRule::FourSigma;
  EXPECT_TRUE(c.passed());
  c.target = 1.41;
  EXPECT_FALSE(c.passed());
  c.bias_allowance = 0.02;
  EXPECT_TRUE(c.passed());

  c = {};
  c.rule = ToleranceRule::RelativePercent;
  c.percent = 2.0;
  c.target = 100.0;
  c.estimate = 101.9;
  EXPECT_TRUE(c.passed());
  c.estimate = 97.9;
  EXPECT_FALSE(c.passed());
  EXPECT_EQ(c.rule_label(), "relative_percent(2)");

  c = {};
  c.rule = ToleranceRule::SlopeWindow;
  c.lo = 1.8;
  c.hi = 2.2;
  c.estimate = 2.21;
  EXPECT_FALSE(c.passed());
  c.estimate = 1.8;
  EXPECT_TRUE(c.passed());
  EXPECT_EQ(c.rule_label(), "slope_window(1.8,2.2)");

  c = {};
  c.rule = ToleranceRule::AtMost;
  c.target = 1.0;
  c.se = 0.01;
  c.estimate = 1.039;
  EXPECT_TRUE(c.passed());
  c.estimate = 1.05;
  EXPECT_FALSE(c.passed());
  c.estimate = std::nan("");
  EXPECT_FALSE(c.passed());
}

TEST(Unbiasedness, LogisticAtBetaPointNine) {
  const auto cfg = make_logistic_config(0.5, 1.0, 0.9);
  const auto rows = check_unbiasedness(cfg, {0.0, 0.4}, 1000000, {1, 1}, "logistic");
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.passed()) << r.name << " " << r.estimate << " " << r.se;
    EXPECT_EQ(r.bias_allowance, 0.0);
  }
  EXPECT_EQ(rows[1].target, 0.4);
}

TEST(Unbiasedness, CauchitWithBiasAllowance) {
  const auto cfg = make_general_config({LinkKind::Cauchit, 0.25}, 0.5, 1e-8, 512);
  const auto rows = check_unbiasedness(cfg, {0.3}, 1000000, {2, 1}, "cauchit");
  EXPECT_TRUE(rows[0].passed()) << rows[0].estimate << " " << rows[0].se;
  EXPECT_DOUBLE_EQ(rows[0].bias_allowance, 0.25 * cfg.series.sup_residual);
  EXPECT_LE(rows[0].bias_allowance, 0.25 * 1e-8);
}

TEST(Unbiasedness, GapOutsideIntervalRejected) {
  const auto cfg = make_logistic_config(0.5, 1.0);
  EXPECT_THROW(check_unbiasedness(cfg, {1.5}, 100, {1, 1}, "x"), InvalidArgument);
}

TEST(Unbiasedness, WorkerCountDoesNotChangeResults) {
  const auto cfg = make_general_config({LinkKind::Probit, 0.5}, 1.0, 1e-8, 512);
  const auto a = check_unbiasedness(cfg, {0.5}, 50000, {3, 1}, "probit");
  const auto b = check_unbiasedness(cfg, {0.5}, 50000, {3, 4}, "probit");
  EXPECT_EQ(a[0].estimate, b[0].estimate);
  EXPECT_EQ(a[0].se, b[0].se);
}

TEST(Cost, Targets) {
  EXPECT_EQ(check_cost({0.5}, EstimatorPath::Logistic, 1000, {1, 1}).target, 4.0);
  EXPECT_EQ(check_cost({0.5}, EstimatorPath::General, 1000, {1, 1}).target, 6.0);
  const auto c = check_cost({0.9}, EstimatorPath::Logistic, 1000000, {4, 1});
  EXPECT_NEAR(c.target, 100.0, 1e-10);
  EXPECT_TRUE(c.passed()) << c.estimate;
  EXPECT_EQ(c.provenance, "analytic");
}

TEST(SecondMoment, SlopeAndCertifiedConstant) {
  const double beta = default_beta(interval_for_gap_bound({LinkKind::Logistic, 1.0}, 2.0));
  const auto sm = check_second_moment_scaling(LinkKind::Logistic, {0.1, 0.2, 0.4, 0.8}, beta, 200000, {5, 1});
  EXPECT_TRUE(sm.slope.passed()) << sm.slope.estimate;
  ASSERT_EQ(sm.points.size(), 4u);
  double max_ratio = 0.0;
  for (const auto& p : sm.points) {
    EXPECT_DOUBLE_EQ(p.tau, p.gap_bound / 2);
    max_ratio = std::max(max_ratio, p.second_moment / (p.gap_bound * p.gap_bound));
  }
  EXPECT_EQ(sm.c_delta, max_ratio);
  EXPECT_GT(sm.c_delta, 1.0);  // E[gap^2] >= gap^2 = B^2
}

TEST(SecondMoment, GeneralLinkSlope) {
  const auto cfg = make_general_config({LinkKind::Cauchit, 0.4}, 0.8, 1e-8, 512);
  const auto sm =
      check_second_moment_scaling(LinkKind::Cauchit, {0.1, 0.2, 0.4, 0.8}, cfg.schedule.beta, 100000, {6, 1});
  EXPECT_TRUE(sm.slope.passed()) << sm.slope.estimate;
}

TEST(SecondMoment, InvalidBetaIsConfigError) {
  EXPECT_THROW(check_second_moment_scaling(LinkKind::Logistic, {0.1, 0.2, 0.4, 0.8}, 0.8, 100, {1, 1}), ConfigError);
  EXPECT_THROW(check_second_moment_scaling(LinkKind::Logistic, {0.1, 0.2, 0.4}, 0.95, 100, {1, 1}), InvalidArgument);
}

TEST(SecondMoment, FixedTemperatureNegativeControl) {
  // tau held at 0.5 while B shrinks: E[gap^2] / B^2 grows, the O(B^2) scaling needs tau = O(B).
  const double beta = default_beta(interval_for_gap_bound({LinkKind::Logistic, 0.5}, 0.8));
  double prev_ratio = 0.0;
  for (double B : {0.8, 0.4, 0.2, 0.1}) {
    const auto c = check_series_bounds(make_logistic_config(0.5, B, beta), 100000, {7, 1}, "fixed-tau");
    const double ratio = c.estimate / (B * B);
    EXPECT_GT(ratio, prev_ratio) << B;
    prev_ratio = ratio;
  }
}

TEST(SeriesBounds, TailRatios) {
  const auto logit = make_logistic_config(0.5, 1.0);
  const auto s = series_sums(logit);
  EXPECT_DOUBLE_EQ(s.tail_ratio, logit.interval.alpha / logit.schedule.beta);
  EXPECT_LT(s.tail_ratio, 1.0);
  for (LinkKind k : {LinkKind::Probit, LinkKind::Cauchit}) {
    const auto cfg = make_general_config({k, 0.5}, 1.0, 1e-8, 512);
    const auto g = series_sums(cfg);
    EXPECT_LT(g.tail_ratio, 1.0);
    EXPECT_TRUE(std::isfinite(g.s1) && std::isfinite(g.s2));
  }
  EstimatorConfig bad = logit;
  bad.schedule.beta = 0.5 * logit.interval.alpha;
  EXPECT_THROW(series_sums(bad), ValidityError);
}

TEST(SeriesBounds, EmpiricalSecondMomentBelowBound) {
  for (double B : {0.2, 1.0}) {
    const auto c = check_series_bounds(make_logistic_config(B / 2, B), 400000, {8, 1}, "logistic");
    EXPECT_TRUE(c.passed()) << c.estimate << " vs " << c.target;
  }
  const auto g = check_series_bounds(make_general_config({LinkKind::Probit, 0.5}, 1.0, 1e-8, 512), 400000, {9, 1},
                                     "probit");
  EXPECT_TRUE(g.passed()) << g.estimate << " vs " << g.target;
}

TEST(GradientChecks, ClosedFormTargets) {
  const double delta = 0.1;
  const auto cfg = make_logistic_config(delta, 2 * delta);
  std::vector<Eigen::VectorXd> pts{Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, delta / 2)};
  const auto rows = check_gradient_unbiasedness(Objective::abs1d(), cfg, pts, {delta, 1}, 100000, {10, 1}, "abs1d");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].target, 0.0);
  EXPECT_EQ(rows[1].target, 0.5);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.passed()) << r.name;
    EXPECT_EQ(r.provenance, "closed-form");
  }

  const Objective q = Objective::smooth_quadratic(3, 3.0);
  const double B = 2 * q.lipschitz() * delta;
  const auto qrows = check_gradient_unbiasedness(q, make_logistic_config(B / 2, B), {Eigen::Vector3d(1.0, 2.0, 3.0)},
                                                 {delta, 3}, 100000, {11, 1}, "quadratic");
  ASSERT_EQ(qrows.size(), 3u);
  for (int j = 0; j < 3; ++j) {
    EXPECT_EQ(qrows[j].target, j + 1.0);
    EXPECT_TRUE(qrows[j].passed()) << qrows[j].name;
  }
}

TEST(GradientChecks, IntervalMustCoverSmoothingPairs) {
  const auto narrow = make_logistic_config(0.1, 0.1);
  EXPECT_THROW(check_gradient_unbiasedness(Objective::abs1d(), narrow, {Eigen::VectorXd::Zero(1)}, {0.1, 1}, 100,
                                           {1, 1}, "x"),
               InvalidArgument);
}

TEST(Parallel, ChunkedReductionIsOrderIndependent) {
  auto body = [](std::int64_t c, std::int64_t b, std::int64_t e) {
    MeanAccumulator a;
    Rng r = Rng::derive(5, Stream::Replicate, {static_cast<std::uint64_t>(c)});
    for (std::int64_t i = b; i < e; ++i) a.add(r.normal() * 1e3 + 1e-3 * static_cast<double>(i));
    return a;
  };
  const auto one = run_chunked<MeanAccumulator>(100003, 1, body);
  const auto many = run_chunked<MeanAccumulator>(100003, 4, body);
  EXPECT_EQ(one.count(), 100003);
  EXPECT_EQ(one.mean(), many.mean());
  EXPECT_EQ(one.standard_error(), many.standard_error());
}

TEST(Parallel, ExceptionsPropagate) {
  auto body = [](std::int64_t c, std::int64_t, std::int64_t) -> MeanAccumulator {
    if (c == 3) throw std::runtime_error("boom");
    return {};
  };
  EXPECT_THROW(run_chunked<MeanAccumulator>(100000, 3, body), std::runtime_error);
}

TEST(Stats, CompensatedSum) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 10; ++i) s.add(1e-16);
  EXPECT_DOUBLE_EQ(s.value(), 1.0 + 1e-15);
  MeanAccumulator m;
  for (double x : {1.0, 2.0, 3.0, 4.0}) m.add(x);
  EXPECT_DOUBLE_EQ(m.mean(), 2.5);
  EXPECT_NEAR(m.variance(), 5.0 / 3.0, 1e-15);
}
