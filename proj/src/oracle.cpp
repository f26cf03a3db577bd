#include "cmpopt/oracle.hpp"

#include <cmath>
#include <utility>

#include "cmpopt/errors.hpp"

namespace cmpopt {

ComparisonOracle::ComparisonOracle(const Objective& objective, LinkSpec link, Rng rng)
    : objective_(&objective), link_(link), rng_(std::move(rng)) {
  if (!(link_.tau > 0.0)) throw InvalidArgument("oracle: link temperature must be positive");
}

double ComparisonOracle::win_probability(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  if (x.size() != objective_->dimension() || y.size() != objective_->dimension())
    throw InvalidArgument("oracle: point dimension does not match the objective");
  return sigma(link_, objective_->value(y) - objective_->value(x));
}

bool ComparisonOracle::compare(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double p = win_probability(x, y);
  ++query_count_;
  return rng_.uniform() < p;
}

BlockOutcome ComparisonOracle::compare_block(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int m) {
  if (m < 1) throw InvalidArgument("compare_block: block size m must be >= 1");
  const double p = win_probability(x, y);
  query_count_ += m;
  const double u = rng_.uniform();
  BlockOutcome out;
  out.size = m;
  if (m == 1) {
    out.all_ones = u < p;
    out.all_zeros = !out.all_ones;
    return out;
  }
  out.all_ones = u < std::pow(p, m);
  out.all_zeros = !out.all_ones && (1.0 - u) <= std::pow(1.0 - p, m);
  return out;
}

}  // namespace cmpopt
