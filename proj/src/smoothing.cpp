#include "cmpopt/smoothing.hpp"

#include <cmath>

#include "cmpopt/errors.hpp"
#include "cmpopt/stats.hpp"

namespace cmpopt {

void SmoothingParams::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("smoothing radius delta must be positive");
  if (dimension < 1) throw InvalidArgument("smoothing dimension must be >= 1");
}

Eigen::VectorXd sample_sphere(int d, Rng& rng) {
  if (d < 1) throw InvalidArgument("sample_sphere: dimension must be >= 1");
  if (d == 1) return Eigen::VectorXd::Constant(1, (rng.next_u64() >> 63) ? 1.0 : -1.0);
  Eigen::VectorXd u(d);
  double norm = 0.0;
  do {
    for (int i = 0; i < d; ++i) u[i] = rng.normal();
    norm = u.norm();
  } while (norm == 0.0);
  return u / norm;
}

GradientSample gradient_sample(const EstimatorConfig& config, ComparisonOracle& oracle, const Eigen::VectorXd& x,
                               const SmoothingParams& params, Rng& direction_rng, Rng& truncation_rng) {
  params.validate();
  if (x.size() != params.dimension) throw InvalidArgument("gradient_sample: point dimension mismatch");
  GradientSample s;
  s.direction = sample_sphere(params.dimension, direction_rng);
  const Eigen::VectorXd step = params.delta * s.direction;
  s.gap = estimate_gap(config, oracle, x - step, x + step, truncation_rng);
  s.vector = (params.scale() * s.gap.value) * s.direction;
  return s;
}

ReferenceGradient reference_smoothed_gradient(const Objective& objective, const Eigen::VectorXd& x,
                                              const SmoothingParams& params, std::int64_t n_samples, Rng& rng) {
  params.validate();
  if (n_samples < 1) throw InvalidArgument("reference_smoothed_gradient: n_samples must be >= 1");
  if (x.size() != params.dimension || objective.dimension() != params.dimension)
    throw InvalidArgument("reference_smoothed_gradient: dimension mismatch");
  const int d = params.dimension;
  std::vector<MeanAccumulator> acc(d);
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const Eigen::VectorXd u = sample_sphere(d, rng);
    const Eigen::VectorXd step = params.delta * u;
    const double g = params.scale() * (objective.value(x + step) - objective.value(x - step));
    for (int j = 0; j < d; ++j) acc[j].add(g * u[j]);
  }
  ReferenceGradient out;
  out.mean.resize(d);
  out.standard_error.resize(d);
  for (int j = 0; j < d; ++j) {
    out.mean[j] = acc[j].mean();
    out.standard_error[j] = acc[j].standard_error();
  }
  out.samples = n_samples;
  return out;
}

}  // namespace cmpopt
