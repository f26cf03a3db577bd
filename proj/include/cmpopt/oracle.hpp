#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "cmpopt/links.hpp"
#include "cmpopt/objectives.hpp"
#include "cmpopt/rng.hpp"

namespace cmpopt {

/// Outcome of m repeated comparisons of one pair: whether all were 1, whether all were 0.
struct BlockOutcome {
  int size = 0;
  bool all_ones = false;
  bool all_zeros = false;

  /// A_m - B_m.
  int signed_indicator() const { return static_cast<int>(all_ones) - static_cast<int>(all_zeros); }
};

/// Simulated pairwise-comparison oracle: compare(x, y) is 1 with probability
/// sigma((f(y) - f(x)) / tau).
///
/// Not thread-safe; use one instance per worker with its own derived stream. query_count counts
/// every comparison issued, including all m members of a block.
class ComparisonOracle {
 public:
  ComparisonOracle(const Objective& objective, LinkSpec link, Rng rng);

  /// One comparison; consumes exactly one uniform draw.
  bool compare(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

  /// m comparisons of the same pair, reported through (A_m, B_m).
  ///
  /// Only the block statistic is materialized: one uniform U selects all-ones when
  /// U < p^m and all-zeros when 1 - U <= (1-p)^m, which has exactly the law of m independent
  /// Bernoulli(p) draws reduced to (A_m, B_m). query_count still advances by m.
  BlockOutcome compare_block(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int m);

  /// Win probability sigma((f(y) - f(x)) / tau) of the pair (privileged; not counted).
  double win_probability(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  std::int64_t query_count() const { return query_count_; }
  void reset_stats() { query_count_ = 0; }

  const Objective& objective() const { return *objective_; }
  const LinkSpec& link() const { return link_; }

 private:
  const Objective* objective_;
  LinkSpec link_;
  Rng rng_;
  std::int64_t query_count_ = 0;
};

}  // namespace cmpopt
