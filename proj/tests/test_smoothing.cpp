#include <gtest/gtest.h>

#include <cmath>

#include "cmpopt/errors.hpp"
#include "cmpopt/smoothing.hpp"
#include "cmpopt/verify.hpp"

using namespace cmpopt;

TEST(Sphere, RademacherInOneDimension) {
  Rng rng(1);
  const int n = 1000000;
  int plus = 0;
  for (int i = 0; i < n; ++i) {
    const auto u = sample_sphere(1, rng);
    ASSERT_TRUE(u[0] == 1.0 || u[0] == -1.0);
    plus += u[0] > 0;
  }
  EXPECT_NEAR(static_cast<double>(plus) / n, 0.5, 0.002);
}

TEST(Sphere, UnitNorm) {
  Rng rng(2);
  for (int d : {2, 3, 7, 50})
    for (int i = 0; i < 1000; ++i) ASSERT_NEAR(sample_sphere(d, rng).norm(), 1.0, 1e-12);
}

TEST(Sphere, IsotropicSecondMoment) {
  Rng rng(3);
  const int n = 1000000;
  Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d u = sample_sphere(3, rng);
    acc += u * u.transpose();
  }
  acc /= n;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(acc(a, b), a == b ? 1.0 / 3.0 : 0.0, 0.01);
}

TEST(Sphere, RejectsZeroDimension) {
  Rng rng(4);
  EXPECT_THROW(sample_sphere(0, rng), InvalidArgument);
}

TEST(GradientSample, ScalingIsExact) {
  const Objective f = Objective::abs1d();
  const auto cfg = make_logistic_config(0.5, 1.0);
  ComparisonOracle o(f, cfg.link, Rng(5));
  Rng dir(6), trunc(7);
  for (int i = 0; i < 1000; ++i) {
    const auto g = gradient_sample(cfg, o, Eigen::VectorXd::Constant(1, 0.2), {0.5, 1}, dir, trunc);
    ASSERT_EQ(g.vector[0], g.gap.value * g.direction[0]);
  }
  const Objective q = Objective::smooth_quadratic(4, 2.0);
  const auto qcfg = make_logistic_config(1.0, 2.0 * q.lipschitz() * 0.2);
  ComparisonOracle oq(q, qcfg.link, Rng(8));
  for (int i = 0; i < 1000; ++i) {
    const auto g = gradient_sample(qcfg, oq, Eigen::VectorXd::Constant(4, 0.3), {0.2, 4}, dir, trunc);
    ASSERT_NEAR(g.direction.norm(), 1.0, 1e-12);
    ASSERT_EQ(g.vector, (4.0 / 0.4 * g.gap.value) * g.direction);
    ASSERT_NEAR(g.vector.norm(), 10.0 * std::abs(g.gap.value), 1e-12 * (1 + g.vector.norm()));
  }
}

TEST(GradientSample, ConstantObjectiveHasZeroMean) {
  const Objective f = Objective::max_affine(Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Constant(1, 3.0));
  const auto cfg = make_logistic_config(0.5, 1.0);
  ComparisonOracle o(f, cfg.link, Rng(9));
  Rng dir(10), trunc(11);
  const int n = 200000;
  Eigen::Vector2d s = Eigen::Vector2d::Zero(), s2 = Eigen::Vector2d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d g = gradient_sample(cfg, o, Eigen::Vector2d(0.3, -1.0), {0.25, 2}, dir, trunc).vector;
    s += g;
    s2 += g.cwiseProduct(g);
  }
  for (int j = 0; j < 2; ++j) {
    const double m = s[j] / n;
    EXPECT_NEAR(m, 0.0, 4.0 * std::sqrt((s2[j] / n - m * m) / n));
  }
}

TEST(GradientSample, Abs1DMatchesClosedForm) {
  const Objective f = Objective::abs1d();
  const auto cfg = make_logistic_config(0.1, 0.2);
  ComparisonOracle o(f, cfg.link, Rng(12));
  Rng dir(13), trunc(14);
  const int n = 1000000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double g = gradient_sample(cfg, o, Eigen::VectorXd::Constant(1, 0.05), {0.1, 1}, dir, trunc).vector[0];
    s += g;
    s2 += g * g;
  }
  const double m = s / n;
  EXPECT_NEAR(m, 0.5, 4.0 * std::sqrt((s2 / n - m * m) / n));
}

TEST(ReferenceGradient, QuadraticRecoversPoint) {
  const Objective f = Objective::smooth_quadratic(3, 4.0);
  Eigen::Vector3d x(1.0, -2.0, 0.5);
  Rng rng(15);
  const auto r = reference_smoothed_gradient(f, x, {0.3, 3}, 200000, rng);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(r.mean[j], x[j], 4.0 * r.standard_error[j]);
  EXPECT_EQ(r.samples, 200000);
}

TEST(ReferenceGradient, ConstantAndSymmetricCases) {
  Rng rng(16);
  const Objective c = Objective::max_affine(Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Constant(1, -1.0));
  const auto rc = reference_smoothed_gradient(c, Eigen::Vector2d(1.0, 2.0), {0.1, 2}, 1000, rng);
  EXPECT_EQ(rc.mean.norm(), 0.0);
  const auto ra = reference_smoothed_gradient(Objective::abs1d(), Eigen::VectorXd::Zero(1), {0.1, 1}, 100000, rng);
  EXPECT_NEAR(ra.mean[0], 0.0, 4.0 * ra.standard_error[0] + 1e-15);
  EXPECT_THROW(reference_smoothed_gradient(c, Eigen::Vector2d(1.0, 2.0), {0.1, 2}, 0, rng), InvalidArgument);
  EXPECT_THROW(reference_smoothed_gradient(c, Eigen::Vector2d(1.0, 2.0), {0.0, 2}, 10, rng), InvalidArgument);
}

TEST(GradientSample, AgreesWithReferenceWithoutClosedForm) {
  // Objectives without a closed-form smoothed gradient: comparison-based mean against the
  // value-based reference, combined standard errors.
  const Objective objs[] = {Objective::l1_norm(2), Objective::random_max_affine(3, 4, 5)};
  const double delta = 0.2;
  const VerifyContext ctx{31, 1};
  for (const Objective& f : objs) {
    const double B = 2.0 * f.lipschitz() * delta;
    const auto cfg = make_logistic_config(0.5 * B, B);
    std::vector<Eigen::VectorXd> pts;
    Rng rng(17);
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd x(f.dimension());
      for (int j = 0; j < f.dimension(); ++j) x[j] = 0.5 * rng.normal();
      pts.push_back(x);
    }
    for (const auto& c : check_gradient_unbiasedness(f, cfg, pts, {delta, f.dimension()}, 100000, ctx, f.describe())) {
      EXPECT_TRUE(c.passed()) << c.name << " est=" << c.estimate << " target=" << c.target << " se=" << c.se;
      EXPECT_EQ(c.provenance, "mc-oracle");
    }
  }
}

TEST(GradientSample, SecondMomentWithinCertifiedConstant) {
  const VerifyContext ctx{41, 1};
  const double beta = default_beta(interval_for_gap_bound({LinkKind::Logistic, 1.0}, 2.0));
  const auto sm = check_second_moment_scaling(LinkKind::Logistic, {0.1, 0.2, 0.4, 0.8}, beta, 200000, ctx);
  const Objective f = Objective::smooth_quadratic(2, 2.0);
  const double delta = 0.1;
  const double L = f.lipschitz();
  const auto cfg = make_logistic_config(L * delta, 2.0 * L * delta);
  ComparisonOracle o(f, cfg.link, Rng(18));
  Rng dir(19), trunc(20);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double g2 = gradient_sample(cfg, o, Eigen::Vector2d(1.5, -1.0), {delta, 2}, dir, trunc).vector.squaredNorm();
    s += g2;
    s2 += g2 * g2;
  }
  const double m = s / n;
  EXPECT_LE(m, sm.c_delta * 4.0 * L * L + 4.0 * std::sqrt((s2 / n - m * m) / n));
}
