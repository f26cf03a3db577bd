#include "cmpopt/links.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cmpopt/errors.hpp"

namespace cmpopt {

namespace {

// Wichura, Algorithm AS 241 (PPND16): inverse normal CDF, ~1e-16 relative accuracy.
double inverse_normal_cdf(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        ((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
            4.5921953931549871457e+4) *
               r +
           1.3731693765509461125e+4) *
              r +
          1.9715909503065514427e+3) *
             r +
         1.3314166789178437745e+2) *
            r +
        3.3871328727963666080e0;
    const double den =
        ((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
            2.1213794301586595867e+4) *
               r +
           5.3941960214247511077e+3) *
              r +
          6.8718700749205790830e+2) *
             r +
         4.2313330701600911252e+1) *
            r +
        1.0;
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        ((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
            1.27045825245236838258e0) *
               r +
           3.64784832476320460504e0) *
              r +
          5.76949722146069140550e0) *
             r +
         4.63033784615654529590e0) *
            r +
        1.42343711074968357734e0;
    const double den =
        ((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
            1.48103976427480074590e-1) *
               r +
           6.89767334985100004550e-1) *
              r +
          1.67638483018380384940e0) *
             r +
         2.05319162663775882187e0) *
            r +
        1.0;
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
            2.65321895265761230930e-2) *
               r +
           2.96560571828504891230e-1) *
              r +
          1.78482653991729133580e0) *
             r +
         5.46378491116411436990e0) *
            r +
        6.65790464350110377720e0;
    const double den =
        ((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
            7.86869131145613259100e-4) *
               r +
           1.48753612908506148525e-2) *
              r +
          1.36929880922735805310e-1) *
             r +
         5.99832206555887937690e-1) *
            r +
        1.0;
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

void require_tau(const LinkSpec& link) {
  if (!(link.tau > 0.0) || !std::isfinite(link.tau))
    throw InvalidArgument("link temperature tau must be a positive finite number");
}

}  // namespace

std::string_view to_string(LinkKind kind) {
  switch (kind) {
    case LinkKind::Logistic:
      return "logistic";
    case LinkKind::Probit:
      return "probit";
    case LinkKind::Cauchit:
      return "cauchit";
  }
  return "unknown";
}

LinkKind parse_link_kind(std::string_view name) {
  if (name == "logistic") return LinkKind::Logistic;
  if (name == "probit") return LinkKind::Probit;
  if (name == "cauchit") return LinkKind::Cauchit;
  throw InvalidArgument("unknown link '" + std::string(name) + "' (expected logistic, probit or cauchit)");
}

double standard_sigma(LinkKind kind, double t) {
  switch (kind) {
    case LinkKind::Logistic:
      if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
      {
        const double e = std::exp(t);
        return e / (1.0 + e);
      }
    case LinkKind::Probit:
      return 0.5 * std::erfc(-t / std::numbers::sqrt2);
    case LinkKind::Cauchit:
      return 0.5 + std::atan(t) / std::numbers::pi;
  }
  return 0.5;
}

double standard_inverse(LinkKind kind, double p) {
  switch (kind) {
    case LinkKind::Logistic:
      return std::log(p) - std::log1p(-p);
    case LinkKind::Probit:
      return inverse_normal_cdf(p);
    case LinkKind::Cauchit:
      return std::tan(std::numbers::pi * (p - 0.5));
  }
  return 0.0;
}

double sigma(const LinkSpec& link, double delta) {
  require_tau(link);
  if (!std::isfinite(delta)) throw InvalidArgument("sigma: gap must be finite");
  return standard_sigma(link.kind, delta / link.tau);
}

double inverse(const LinkSpec& link, double p) {
  require_tau(link);
  if (!(p > 0.0 && p < 1.0)) throw DomainError("inverse: probability must lie in (0, 1)");
  return link.tau * standard_inverse(link.kind, p);
}

OperatedInterval interval_for_gap_bound(const LinkSpec& link, double gap_bound) {
  if (!(gap_bound >= 0.0) || !std::isfinite(gap_bound))
    throw InvalidArgument("gap bound B must be a nonnegative finite number");
  OperatedInterval iv;
  iv.gap_bound = gap_bound;
  iv.p_plus = sigma(link, gap_bound);
  iv.p_minus = 1.0 - iv.p_plus;
  iv.alpha = iv.p_plus;
  return iv;
}

OperatedInterval operated_interval(const LinkSpec& link, double lipschitz_L, double radius_delta) {
  if (!(lipschitz_L > 0.0)) throw InvalidArgument("Lipschitz constant L must be positive");
  if (!(radius_delta > 0.0)) throw InvalidArgument("smoothing radius delta must be positive");
  return interval_for_gap_bound(link, 2.0 * lipschitz_L * radius_delta);
}

double bernoulli_product_poly(int m, double p) {
  if (m < 1) throw InvalidArgument("bernoulli_product_poly: degree m must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bernoulli_product_poly: p must lie in [0, 1]");
  return std::pow(p, m) - std::pow(1.0 - p, m);
}

}  // namespace cmpopt
