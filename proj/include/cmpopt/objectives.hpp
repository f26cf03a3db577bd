#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cmpopt {

enum class ObjectiveKind { Abs1D, L1Norm, MaxAffine, SmoothQuadratic };

std::string_view to_string(ObjectiveKind kind);
ObjectiveKind parse_objective_kind(std::string_view name);

/// Nonsmooth Lipschitz test functions with declared Lipschitz constants.
///
///   Abs1D            f(x) = |x|,                       L = 1
///   L1Norm           f(x) = sum_i |x_i|,               L = sqrt(d)
///   MaxAffine        f(x) = max_i (a_i . x + b_i),     L = max_i ||a_i||
///   SmoothQuadratic  f(x) = ||x||^2 / 2 on [-R, R]^d,  L = R sqrt(d)
///
/// SmoothQuadratic is only Lipschitz on its declared box; queries outside it are still
/// answered, but gaps may then exceed the bound implied by L.
class Objective {
 public:
  static Objective abs1d();
  static Objective l1_norm(int dimension);
  /// Rows of `slopes` are the a_i. A MaxAffine with all-zero slopes is a constant (L = 0).
  static Objective max_affine(Eigen::MatrixXd slopes, Eigen::VectorXd offsets);
  /// Reproducible random instance: a_i ~ N(0, I_d), b_i ~ N(0, 1/4), drawn from the Objective
  /// stream of `seed` in row order.
  static Objective random_max_affine(int dimension, int pieces, std::uint64_t seed);
  static Objective smooth_quadratic(int dimension, double box_radius);

  ObjectiveKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  double lipschitz() const { return lipschitz_; }
  std::string describe() const;

  /// Throws InvalidArgument on dimension mismatch.
  double value(const Eigen::VectorXd& x) const;

  /// Gradient of the ball-smoothed function when a closed form is known (Abs1D, SmoothQuadratic).
  std::optional<Eigen::VectorXd> smoothed_gradient(const Eigen::VectorXd& x, double delta) const;

  /// Value of the ball-smoothed function when a closed form is known.
  std::optional<double> smoothed_value(const Eigen::VectorXd& x, double delta) const;

  const Eigen::MatrixXd& slopes() const { return slopes_; }
  const Eigen::VectorXd& offsets() const { return offsets_; }
  double box_radius() const { return box_radius_; }

 private:
  Objective(ObjectiveKind kind, int dimension, double lipschitz);

  ObjectiveKind kind_;
  int dimension_;
  double lipschitz_;
  Eigen::MatrixXd slopes_;
  Eigen::VectorXd offsets_;
  double box_radius_ = 0.0;
};

/// d/dx of E|x + delta V|, V ~ Unif[-1, 1]: x/delta inside the smoothing interval, sign(x) outside.
double abs1d_smoothed_gradient(double x, double delta);

}  // namespace cmpopt
