#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>

#include "cmpopt/errors.hpp"
#include "cmpopt/links.hpp"

namespace cmpopt {

namespace {

// Decay priors tried in order. gamma = 1 is plain minimum-norm; gamma < 1 penalizes
// late coefficients harder, which is what pulls the tail under a geometric envelope.
constexpr double kDecayPriors[] = {1.0, 0.99, 0.98, 0.97, 0.96, 0.95, 0.93, 0.9, 0.85, 0.8};
// Tikhonov strength as a multiple of the requested tolerance, strongest first.
constexpr double kRegularizationFactors[] = {10.0, 1.0, 0.1, 0.01};

std::vector<int> term_schedule(int max_terms) {
  std::vector<int> ks;
  for (int k = 8; k < max_terms; k *= 2) ks.push_back(k);
  ks.push_back(max_terms);
  return ks;
}

// Odd-degree basis matrix: row i holds b_{2k-1}(nodes[i]) * gamma^k for k = 1..K.
Eigen::MatrixXd odd_basis(const Eigen::VectorXd& nodes, int K, double gamma) {
  Eigen::MatrixXd A(nodes.size(), K);
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    const double p = nodes[i];
    const double q = 1.0 - p;
    const double p2 = p * p;
    const double q2 = q * q;
    double pk = p;
    double qk = q;
    double gk = gamma;
    for (int k = 0; k < K; ++k) {
      A(i, k) = (pk - qk) * gk;
      pk *= p2;
      qk *= q2;
      gk *= gamma;
    }
  }
  return A;
}

double sup_error_on_grid(const std::vector<double>& c, SeriesBasis basis, LinkKind kind, double lo, double hi,
                         int points) {
  double worst = 0.0;
  const int K = static_cast<int>(c.size());
  for (int j = 0; j < points; ++j) {
    const double p = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(j) / (points - 1);
    const double q = 1.0 - p;
    double sum = 0.0;
    if (basis == SeriesBasis::OddDegrees) {
      const double p2 = p * p;
      const double q2 = q * q;
      double pk = p;
      double qk = q;
      for (int k = 0; k < K; ++k) {
        sum += c[k] * (pk - qk);
        pk *= p2;
        qk *= q2;
      }
    } else {
      double pk = p;
      double qk = q;
      for (int k = 0; k < K; ++k) {
        sum += c[k] * (pk - qk);
        pk *= p;
        qk *= q;
      }
    }
    worst = std::max(worst, std::abs(sum - standard_inverse(kind, p)));
  }
  return worst;
}

struct SvdCache {
  Eigen::MatrixXd V;
  Eigen::VectorXd s;
  Eigen::VectorXd rhs;  // U^T y
};

// First fit (strongest regularization, then fewest terms) under one decay prior that meets the
// tolerance. Returns nothing when none does, or when that fit's tail does not decay.
std::optional<CoefficientSeries> fit_with_prior(LinkKind kind, double lo, double hi, double tolerance,
                                                const std::vector<int>& schedule, double gamma,
                                                double& best_residual, bool& reached_tolerance) {
  std::map<int, SvdCache> cache;
  auto solve = [&](int K) -> const SvdCache& {
    auto it = cache.find(K);
    if (it != cache.end()) return it->second;
    const int n = 4 * K;
    Eigen::VectorXd nodes(n);
    Eigen::VectorXd y(n);
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (int j = 0; j < n; ++j) {
      nodes[j] = mid + half * std::cos(std::numbers::pi * (j + 0.5) / n);
      y[j] = standard_inverse(kind, nodes[j]);
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(odd_basis(nodes, K, gamma), Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdCache entry{svd.matrixV(), svd.singularValues(), svd.matrixU().transpose() * y};
    return cache.emplace(K, std::move(entry)).first->second;
  };

  for (double factor : kRegularizationFactors) {
    const double lambda = factor * tolerance;
    for (int K : schedule) {
      const SvdCache& sv = solve(K);
      const Eigen::VectorXd filt =
          (sv.s.array() / (sv.s.array().square() + lambda * lambda)).matrix().cwiseProduct(sv.rhs);
      const Eigen::VectorXd scaled = sv.V * filt;
      std::vector<double> c(K);
      double gk = gamma;
      for (int k = 0; k < K; ++k) {
        c[k] = scaled[k] * gk;
        gk *= gamma;
      }
      const double residual = sup_error_on_grid(c, SeriesBasis::OddDegrees, kind, lo, hi, 40 * K + 1);
      best_residual = std::min(best_residual, residual);
      if (residual > tolerance) continue;

      reached_tolerance = true;
      const auto env = fit_decay_envelope(c);
      if (!(env.rho < 1.0)) return std::nullopt;

      CoefficientSeries s;
      s.basis = SeriesBasis::OddDegrees;
      s.coefficients = std::move(c);
      s.sup_residual = residual;
      s.decay_C = env.C;
      s.decay_rho = env.rho;
      s.regularization = lambda;
      s.decay_prior = gamma;
      return s;
    }
  }
  return std::nullopt;
}

}  // namespace

DecayEnvelope fit_decay_envelope(const std::vector<double>& coefficients) {
  const int K = static_cast<int>(coefficients.size());
  DecayEnvelope env;
  if (K == 0) return env;

  const int start = K >= 4 ? K / 2 : 0;
  double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
  int n = 0;
  for (int i = start; i < K; ++i) {
    const double a = std::abs(coefficients[i]);
    if (a == 0.0) continue;
    const double k = i + 1;
    const double y = std::log(a);
    sk += k;
    sy += y;
    skk += k * k;
    sky += k * y;
    ++n;
  }
  if (n >= 2) {
    const double slope = (n * sky - sk * sy) / (n * skk - sk * sk);
    env.rho = std::exp(slope);
  }

  const double log_rho = std::log(env.rho);
  double log_c = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < K; ++i) {
    const double a = std::abs(coefficients[i]);
    if (a == 0.0) continue;
    log_c = std::max(log_c, std::log(a) - (i + 1) * log_rho);
  }
  env.C = std::isfinite(log_c) ? std::exp(log_c) * (1.0 + 1e-12) : 1.0;
  return env;
}

CoefficientSeries logistic_coefficients(int max_terms, const OperatedInterval& interval) {
  if (max_terms < 1) throw InvalidArgument("logistic_coefficients: max_terms must be >= 1");
  CoefficientSeries s;
  s.basis = SeriesBasis::AllDegrees;
  s.fit_interval = interval;
  s.coefficients.resize(max_terms);
  for (int m = 1; m <= max_terms; ++m) s.coefficients[m - 1] = 1.0 / m;
  const double a = interval.alpha;
  const double K1 = max_terms + 1.0;
  s.sup_residual = 2.0 * std::pow(a, K1) / (K1 * (1.0 - a));
  const auto env = fit_decay_envelope(s.coefficients);
  s.decay_C = env.C;
  s.decay_rho = env.rho;
  return s;
}

CoefficientSeries fit_odd_coefficients(LinkKind kind, const OperatedInterval& interval, double tolerance,
                                       int max_terms) {
  if (!(tolerance > 0.0)) throw InvalidArgument("fit_odd_coefficients: tolerance must be positive");
  if (max_terms < 1) throw InvalidArgument("fit_odd_coefficients: max_terms must be >= 1");
  const double lo = interval.p_minus;
  const double hi = interval.p_plus;
  if (!(lo > 0.0 && hi < 1.0 && lo < 0.5 && hi > 0.5))
    throw InvalidArgument("fit_odd_coefficients: interval must satisfy 0 < p_minus < 1/2 < p_plus < 1");

  const std::vector<int> schedule = term_schedule(max_terms);
  double best_residual = std::numeric_limits<double>::infinity();
  bool reached_tolerance = false;

  for (double gamma : kDecayPriors) {
    if (auto s = fit_with_prior(kind, lo, hi, tolerance, schedule, gamma, best_residual, reached_tolerance)) {
      s->fit_interval = interval;
      return *std::move(s);
    }
  }

  if (reached_tolerance)
    throw FitFailure("fit_odd_coefficients: tolerance reached but no fit has a decaying coefficient envelope",
                     best_residual);
  throw FitFailure("fit_odd_coefficients: tolerance " + std::to_string(tolerance) + " not reached within " +
                       std::to_string(max_terms) + " terms (best residual " + std::to_string(best_residual) + ")",
                   best_residual);
}

double evaluate_series(const CoefficientSeries& series, double p) {
  const auto& iv = series.fit_interval;
  if (!(p >= iv.p_minus && p <= iv.p_plus))
    throw OutOfRange("evaluate_series: p outside the series' fit interval");
  const double q = 1.0 - p;
  const bool odd = series.basis == SeriesBasis::OddDegrees;
  const double pstep = odd ? p * p : p;
  const double qstep = odd ? q * q : q;
  double pk = p;
  double qk = q;
  double sum = 0.0;
  for (double c : series.coefficients) {
    sum += c * (pk - qk);
    pk *= pstep;
    qk *= qstep;
  }
  return sum;
}

double measure_sup_residual(const CoefficientSeries& series, LinkKind kind, int points) {
  if (points < 1) throw InvalidArgument("measure_sup_residual: need at least one grid point");
  return sup_error_on_grid(series.coefficients, series.basis, kind, series.fit_interval.p_minus,
                           series.fit_interval.p_plus, points);
}

}  // namespace cmpopt
