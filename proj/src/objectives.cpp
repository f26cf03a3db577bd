#include "cmpopt/objectives.hpp"

#include <cmath>
#include <sstream>

#include "cmpopt/errors.hpp"
#include "cmpopt/rng.hpp"

namespace cmpopt {

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::Abs1D:
      return "abs1d";
    case ObjectiveKind::L1Norm:
      return "l1norm";
    case ObjectiveKind::MaxAffine:
      return "maxaffine";
    case ObjectiveKind::SmoothQuadratic:
      return "quadratic";
  }
  return "unknown";
}

ObjectiveKind parse_objective_kind(std::string_view name) {
  if (name == "abs1d") return ObjectiveKind::Abs1D;
  if (name == "l1norm") return ObjectiveKind::L1Norm;
  if (name == "maxaffine") return ObjectiveKind::MaxAffine;
  if (name == "quadratic") return ObjectiveKind::SmoothQuadratic;
  throw InvalidArgument("unknown objective '" + std::string(name) +
                        "' (expected abs1d, l1norm, maxaffine or quadratic)");
}

Objective::Objective(ObjectiveKind kind, int dimension, double lipschitz)
    : kind_(kind), dimension_(dimension), lipschitz_(lipschitz) {
  if (dimension < 1) throw InvalidArgument("objective dimension must be >= 1");
}

Objective Objective::abs1d() { return Objective(ObjectiveKind::Abs1D, 1, 1.0); }

Objective Objective::l1_norm(int dimension) {
  return Objective(ObjectiveKind::L1Norm, dimension, std::sqrt(static_cast<double>(dimension)));
}

Objective Objective::max_affine(Eigen::MatrixXd slopes, Eigen::VectorXd offsets) {
  if (slopes.rows() < 1) throw InvalidArgument("max_affine: need at least one affine piece");
  if (offsets.size() != slopes.rows()) throw InvalidArgument("max_affine: one offset per slope row");
  const double L = slopes.rowwise().norm().maxCoeff();
  Objective f(ObjectiveKind::MaxAffine, static_cast<int>(slopes.cols()), L);
  f.slopes_ = std::move(slopes);
  f.offsets_ = std::move(offsets);
  return f;
}

Objective Objective::random_max_affine(int dimension, int pieces, std::uint64_t seed) {
  if (dimension < 1 || pieces < 1) throw InvalidArgument("random_max_affine: dimension and pieces must be >= 1");
  Rng rng = Rng::derive(seed, Stream::Objective);
  Eigen::MatrixXd a(pieces, dimension);
  Eigen::VectorXd b(pieces);
  for (int i = 0; i < pieces; ++i) {
    for (int j = 0; j < dimension; ++j) a(i, j) = rng.normal();
    b[i] = 0.5 * rng.normal();
  }
  return max_affine(std::move(a), std::move(b));
}

Objective Objective::smooth_quadratic(int dimension, double box_radius) {
  if (!(box_radius > 0.0)) throw InvalidArgument("smooth_quadratic: box radius must be positive");
  Objective f(ObjectiveKind::SmoothQuadratic, dimension, box_radius * std::sqrt(static_cast<double>(dimension)));
  f.box_radius_ = box_radius;
  return f;
}

std::string Objective::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(d=" << dimension_;
  if (kind_ == ObjectiveKind::MaxAffine) os << ", pieces=" << slopes_.rows();
  if (kind_ == ObjectiveKind::SmoothQuadratic) os << ", box=" << box_radius_;
  os << ")";
  return os.str();
}

double Objective::value(const Eigen::VectorXd& x) const {
  if (x.size() != dimension_)
    throw InvalidArgument("objective " + describe() + ": point has dimension " + std::to_string(x.size()));
  switch (kind_) {
    case ObjectiveKind::Abs1D:
      return std::abs(x[0]);
    case ObjectiveKind::L1Norm:
      return x.cwiseAbs().sum();
    case ObjectiveKind::MaxAffine:
      return (slopes_ * x + offsets_).maxCoeff();
    case ObjectiveKind::SmoothQuadratic:
      return 0.5 * x.squaredNorm();
  }
  return 0.0;
}

std::optional<Eigen::VectorXd> Objective::smoothed_gradient(const Eigen::VectorXd& x, double delta) const {
  if (x.size() != dimension_) throw InvalidArgument("smoothed_gradient: dimension mismatch");
  switch (kind_) {
    case ObjectiveKind::Abs1D:
      return Eigen::VectorXd::Constant(1, abs1d_smoothed_gradient(x[0], delta));
    case ObjectiveKind::SmoothQuadratic:
      // E||x + delta V||^2 / 2 = ||x||^2 / 2 + const
      return x;
    default:
      return std::nullopt;
  }
}

std::optional<double> Objective::smoothed_value(const Eigen::VectorXd& x, double delta) const {
  if (x.size() != dimension_) throw InvalidArgument("smoothed_value: dimension mismatch");
  switch (kind_) {
    case ObjectiveKind::Abs1D: {
      const double a = std::abs(x[0]);
      return a <= delta ? (a * a + delta * delta) / (2.0 * delta) : a;
    }
    case ObjectiveKind::SmoothQuadratic: {
      // E||V||^2 = d / (d + 2) for V uniform in the unit ball
      const double d = dimension_;
      return 0.5 * x.squaredNorm() + 0.5 * delta * delta * d / (d + 2.0);
    }
    default:
      return std::nullopt;
  }
}

double abs1d_smoothed_gradient(double x, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("abs1d_smoothed_gradient: delta must be positive");
  if (std::abs(x) <= delta) return x / delta;
  return x > 0.0 ? 1.0 : -1.0;
}

}  // namespace cmpopt
