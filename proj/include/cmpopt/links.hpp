#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cmpopt {

enum class LinkKind { Logistic, Probit, Cauchit };

std::string_view to_string(LinkKind kind);
/// Parses "logistic" | "probit" | "cauchit". Throws InvalidArgument otherwise.
LinkKind parse_link_kind(std::string_view name);

/// A symmetric link sigma with temperature tau: P(Y = 1) = sigma(delta / tau).
struct LinkSpec {
  LinkKind kind = LinkKind::Logistic;
  double tau = 1.0;
};

/// Win probabilities reachable when every queried gap satisfies |delta| <= gap_bound.
struct OperatedInterval {
  double p_minus = 0.5;
  double p_plus = 0.5;
  double alpha = 0.5;
  double gap_bound = 0.0;
};

/// Unscaled link sigma(t) and its inverse g(p) (tau = 1).
double standard_sigma(LinkKind kind, double t);
double standard_inverse(LinkKind kind, double p);

/// sigma(delta / tau). Throws InvalidArgument for non-finite delta or tau <= 0.
double sigma(const LinkSpec& link, double delta);

/// tau * g(p). Throws DomainError unless 0 < p < 1.
double inverse(const LinkSpec& link, double p);

/// Interval for an L-Lipschitz objective queried at symmetric pairs x +- delta*u (B = 2 L delta).
OperatedInterval operated_interval(const LinkSpec& link, double lipschitz_L, double radius_delta);

/// Interval for an explicit gap bound B.
OperatedInterval interval_for_gap_bound(const LinkSpec& link, double gap_bound);

/// p^m - (1 - p)^m.
double bernoulli_product_poly(int m, double p);

enum class SeriesBasis { AllDegrees, OddDegrees };

/// Coefficients of the inverse link in the Bernoulli-product basis.
///
/// AllDegrees: coefficients[m-1] multiplies b_m.  OddDegrees: coefficients[k-1] multiplies
/// b_{2k-1}.  The series approximates g = inverse / tau on fit_interval to within sup_residual,
/// and |c_k| <= decay_C * decay_rho^k holds for every stored index k.
struct CoefficientSeries {
  SeriesBasis basis = SeriesBasis::AllDegrees;
  std::vector<double> coefficients;
  OperatedInterval fit_interval;
  double sup_residual = 0.0;
  double decay_C = 1.0;
  double decay_rho = 0.5;

  // Fit diagnostics (OddDegrees only).
  double regularization = 0.0;
  double decay_prior = 1.0;

  int size() const { return static_cast<int>(coefficients.size()); }
  /// Polynomial degree carried by stored index k (1-based).
  int degree(int k) const { return basis == SeriesBasis::AllDegrees ? k : 2 * k - 1; }
};

/// The logit expansion c_m = 1/m, truncated at max_terms for evaluation. sup_residual is the
/// analytic tail bound 2 alpha^{K+1} / ((K+1)(1-alpha)) on the interval.
CoefficientSeries logistic_coefficients(int max_terms, const OperatedInterval& interval);

/// Fits g on the interval in the odd basis {b_1, b_3, ..., b_{2K-1}}.
///
/// Regularized least squares on 4K Chebyshev nodes; the residual is measured on a 40K+1 point
/// equispaced validation grid. K doubles from 8 up to max_terms. Throws FitFailure with the best
/// residual reached when tolerance is not attainable.
CoefficientSeries fit_odd_coefficients(LinkKind kind, const OperatedInterval& interval, double tolerance,
                                       int max_terms);

/// Sum of c_k b_{deg(k)}(p). Throws OutOfRange outside the series' fit interval.
double evaluate_series(const CoefficientSeries& series, double p);

/// Sup of |evaluate_series - g| over `points` equispaced points of the fit interval.
double measure_sup_residual(const CoefficientSeries& series, LinkKind kind, int points);

struct DecayEnvelope {
  double C = 1.0;
  double rho = 0.5;
};

/// Least-squares line through log|c_k| over the trailing half of the coefficients gives rho;
/// C is then the smallest constant with |c_k| <= C rho^k for all k.
DecayEnvelope fit_decay_envelope(const std::vector<double>& coefficients);

}  // namespace cmpopt
