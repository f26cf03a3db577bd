#include <gtest/gtest.h>

#include <cmath>

#include "cmpopt/errors.hpp"
#include "cmpopt/oracle.hpp"

using namespace cmpopt;

namespace {

// f(x) = slope * x on the line; compare(0, 1) then sees gap = slope.
Objective line(double slope) {
  return Objective::max_affine(Eigen::MatrixXd::Constant(1, 1, slope), Eigen::VectorXd::Zero(1));
}

const Eigen::VectorXd kZero = Eigen::VectorXd::Zero(1);
const Eigen::VectorXd kOne = Eigen::VectorXd::Ones(1);

}  // namespace

TEST(Oracle, Counting) {
  const Objective f = line(0.3);
  ComparisonOracle o(f, {LinkKind::Logistic, 1.0}, Rng(1));
  EXPECT_EQ(o.query_count(), 0);
  o.compare_block(kZero, kOne, 5);
  EXPECT_EQ(o.query_count(), 5);
  o.compare(kZero, kOne);
  EXPECT_EQ(o.query_count(), 6);
  o.reset_stats();
  EXPECT_EQ(o.query_count(), 0);
  std::int64_t expected = 0;
  for (int m = 1; m <= 40; ++m) {
    o.compare_block(kZero, kOne, m);
    expected += m;
  }
  EXPECT_EQ(o.query_count(), expected);
}

TEST(Oracle, FairCoinAtZeroGap) {
  const Objective f = line(0.0);
  ComparisonOracle o(f, {LinkKind::Probit, 1.0}, Rng(2));
  const int n = 1000000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += o.compare(kZero, kOne);
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.5, 4.0 * std::sqrt(0.25 / n));
}

TEST(Oracle, LogisticFrequency) {
  const Objective f = line(1.0);
  for (std::uint64_t seed : {3u, 4u}) {
    ComparisonOracle o(f, {LinkKind::Logistic, 1.0}, Rng(seed));
    const int n = 1000000;
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += o.compare(kZero, kOne);
    const double p = 0.7310585786300049;
    EXPECT_NEAR(static_cast<double>(ones) / n, p, 4.0 * std::sqrt(p * (1 - p) / n));
  }
}

TEST(Oracle, FrequencyAllLinks) {
  for (LinkKind k : {LinkKind::Logistic, LinkKind::Probit, LinkKind::Cauchit}) {
    const Objective f = line(-0.4);
    ComparisonOracle o(f, {k, 0.5}, Rng(5));
    const double p = sigma({k, 0.5}, -0.4);
    EXPECT_DOUBLE_EQ(o.win_probability(kZero, kOne), p);
    const int n = 1000000;
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += o.compare(kZero, kOne);
    EXPECT_NEAR(static_cast<double>(ones) / n, p, 4.0 * std::sqrt(p * (1 - p) / n)) << to_string(k);
  }
}

TEST(Oracle, Deterministic) {
  const Objective f = line(0.2);
  ComparisonOracle a(f, {LinkKind::Logistic, 1.0}, Rng(9));
  ComparisonOracle b(f, {LinkKind::Logistic, 1.0}, Rng(9));
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.compare(kZero, kOne), b.compare(kZero, kOne));
    const auto x = a.compare_block(kZero, kOne, 1 + i % 7);
    const auto y = b.compare_block(kZero, kOne, 1 + i % 7);
    ASSERT_EQ(x.all_ones, y.all_ones);
    ASSERT_EQ(x.all_zeros, y.all_zeros);
  }
}

TEST(Block, SingleComparisonIsExactlyOneOfEach) {
  const Objective f = line(0.5);
  ComparisonOracle o(f, {LinkKind::Logistic, 1.0}, Rng(10));
  for (int i = 0; i < 10000; ++i) {
    const auto b = o.compare_block(kZero, kOne, 1);
    ASSERT_NE(b.all_ones, b.all_zeros);
    ASSERT_EQ(std::abs(b.signed_indicator()), 1);
  }
}

TEST(Block, NeverBothAllOnesAndAllZeros) {
  const Objective f = line(0.5);
  ComparisonOracle o(f, {LinkKind::Cauchit, 0.3}, Rng(11));
  for (int i = 0; i < 100000; ++i) {
    const auto b = o.compare_block(kZero, kOne, 2 + i % 9);
    ASSERT_FALSE(b.all_ones && b.all_zeros);
  }
}

TEST(Block, AllOnesAndAllZerosFrequencies) {
  const Objective f = line(1.0);
  ComparisonOracle o(f, {LinkKind::Logistic, 1.0}, Rng(12));
  const double p = 0.7310585786300049;
  const int n = 1000000;
  for (int m : {2, 3, 5}) {
    int ones = 0, zeros = 0;
    for (int i = 0; i < n; ++i) {
      const auto b = o.compare_block(kZero, kOne, m);
      ones += b.all_ones;
      zeros += b.all_zeros;
    }
    const double pa = std::pow(p, m), pb = std::pow(1 - p, m);
    const double se_a = std::sqrt(pa * (1 - pa) / n), se_b = std::sqrt(pb * (1 - pb) / n);
    if (m == 2) EXPECT_NEAR(static_cast<double>(ones) / n, 0.5344, 3.0 * se_a + 1e-4);
    EXPECT_NEAR(static_cast<double>(ones) / n, pa, 4.0 * se_a) << m;
    EXPECT_NEAR(static_cast<double>(zeros) / n, pb, 4.0 * se_b) << m;
  }
}

TEST(Block, SymmetricAtFairCoin) {
  const Objective f = line(0.0);
  ComparisonOracle o(f, {LinkKind::Logistic, 1.0}, Rng(13));
  const int n = 1000000;
  long sum = 0;
  for (int i = 0; i < n; ++i) sum += o.compare_block(kZero, kOne, 3).signed_indicator();
  // Var(A_3 - B_3) = 2 / 8
  EXPECT_NEAR(static_cast<double>(sum) / n, 0.0, 4.0 * std::sqrt(0.25 / n));
}

TEST(Block, MatchesIndividualComparisonsInLaw) {
  // The single-uniform block must have the law of m separate draws.
  const Objective f = line(0.3);
  ComparisonOracle block(f, {LinkKind::Probit, 0.5}, Rng(14));
  ComparisonOracle single(f, {LinkKind::Probit, 0.5}, Rng(15));
  const int n = 300000, m = 4;
  double s_block = 0, s_single = 0;
  for (int i = 0; i < n; ++i) {
    s_block += block.compare_block(kZero, kOne, m).signed_indicator();
    int k = 0;
    for (int j = 0; j < m; ++j) k += single.compare(kZero, kOne);
    s_single += (k == m) - (k == 0);
  }
  EXPECT_EQ(block.query_count(), single.query_count());
  const double p = block.win_probability(kZero, kOne);
  const double var = std::pow(p, m) + std::pow(1 - p, m);
  EXPECT_NEAR(s_block / n - s_single / n, 0.0, 4.0 * std::sqrt(2.0 * var / n));
}

TEST(Oracle, Errors) {
  const Objective f = line(0.3);
  ComparisonOracle o(f, {LinkKind::Logistic, 1.0}, Rng(16));
  EXPECT_THROW(o.compare_block(kZero, kOne, 0), InvalidArgument);
  EXPECT_THROW(o.compare(Eigen::VectorXd::Zero(2), kOne), InvalidArgument);
  EXPECT_THROW(ComparisonOracle(f, {LinkKind::Logistic, 0.0}, Rng(1)), InvalidArgument);
}
