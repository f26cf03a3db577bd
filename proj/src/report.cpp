#include "cmpopt/report.hpp"

#include <cmath>
#include <fmt/format.h>

namespace cmpopt {

namespace {

std::string g17(double x) { return fmt::format("{:.17g}", x); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

nlohmann::ordered_json vec(const Eigen::VectorXd& v) {
  auto a = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// NaN is not representable in JSON.
nlohmann::ordered_json real(double x) { return std::isfinite(x) ? nlohmann::ordered_json(x) : nullptr; }

}  // namespace

std::string summary_csv_header() { return "name,n,estimate,se,target,rule,pass"; }

std::string summary_csv_row(const MonteCarloCheck& c) {
  return fmt::format("{},{},{},{},{},{},{}", csv_field(c.name), c.n, g17(c.estimate), g17(c.se), g17(c.target),
                     csv_field(c.rule_label()), c.passed() ? "true" : "false");
}

void write_summary_csv(std::ostream& out, const std::vector<MonteCarloCheck>& checks) {
  out << summary_csv_header() << '\n';
  for (const auto& c : checks) out << summary_csv_row(c) << '\n';
}

nlohmann::ordered_json to_json(const MonteCarloCheck& c) {
  nlohmann::ordered_json j;
  j["record"] = "check";
  j["name"] = c.name;
  j["n"] = c.n;
  j["estimate"] = real(c.estimate);
  j["se"] = real(c.se);
  j["target"] = real(c.target);
  j["rule"] = c.rule_label();
  j["bias_allowance"] = c.bias_allowance;
  j["provenance"] = c.provenance;
  j["pass"] = c.passed();
  return j;
}

nlohmann::ordered_json to_json(const CoefficientSeries& s) {
  nlohmann::ordered_json j;
  j["basis"] = s.basis == SeriesBasis::AllDegrees ? "all_degrees" : "odd_degrees";
  j["terms"] = s.size();
  j["sup_residual"] = s.sup_residual;
  j["decay_C"] = s.decay_C;
  j["decay_rho"] = s.decay_rho;
  if (s.basis == SeriesBasis::OddDegrees) {
    j["regularization"] = s.regularization;
    j["decay_prior"] = s.decay_prior;
  }
  j["fit_p_minus"] = s.fit_interval.p_minus;
  j["fit_p_plus"] = s.fit_interval.p_plus;
  return j;
}

nlohmann::ordered_json to_json(const EstimatorConfig& c) {
  nlohmann::ordered_json j;
  j["link"] = std::string(to_string(c.link.kind));
  j["tau"] = c.link.tau;
  j["B"] = c.interval.gap_bound;
  j["p_minus"] = c.interval.p_minus;
  j["p_plus"] = c.interval.p_plus;
  j["alpha"] = c.interval.alpha;
  j["beta"] = c.schedule.beta;
  j["path"] = c.path() == EstimatorPath::Logistic ? "logistic" : "general";
  j["predicted_cost"] = predicted_cost(c.schedule, c.path());
  j["series"] = to_json(c.series);
  return j;
}

nlohmann::ordered_json to_json(const SGDParams& p, const ResolvedSGD& r) {
  nlohmann::ordered_json j;
  j["eta"] = r.eta;
  j["eta_auto"] = r.eta_auto;
  j["eta_cap"] = r.eta_cap;
  j["T"] = r.iterations;
  j["T_auto"] = r.iterations_auto;
  j["epsilon"] = p.epsilon;
  j["delta"] = p.delta;
  j["Delta0"] = p.delta0;
  j["CDelta"] = p.c_delta;
  j["L"] = r.lipschitz;
  j["L_delta"] = r.smoothness;
  j["B"] = r.gap_bound;
  j["seed"] = p.seed;
  j["enforce_step_cap"] = p.enforce_step_cap;
  j["diagnostic_samples"] = p.diagnostic_samples;
  return j;
}

nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["record"] = "run";
  j["x_R"] = vec(r.x_R);
  j["R"] = r.R;
  j["total_comparisons"] = r.total_comparisons;
  j["mean_cost_per_iteration"] = r.mean_cost_per_iteration;
  j["predicted_cost"] = r.predicted_cost;
  j["stationarity"] = r.stationarity;
  j["stationarity_se"] = r.stationarity_se;
  j["trace_stationarity"] = r.trace_stationarity;
  j["mean_sq_smoothed_gradient"] = real(r.mean_sq_smoothed_gradient);
  j["mean_sq_gradient_sample"] = r.mean_sq_gradient_sample;
  j["trace_points"] = r.trace.size();
  j["sgd"] = to_json(r.params, r.resolved);
  j["estimator"] = to_json(r.estimator);
  return j;
}

void write_trace_csv(std::ostream& out, const RunReport& r) {
  out << "t";
  const Eigen::Index d = r.x_R.size();
  for (Eigen::Index i = 0; i < d; ++i) out << ",x_" << i;
  out << '\n';
  for (const auto& tp : r.trace) {
    out << tp.t;
    for (Eigen::Index i = 0; i < tp.x.size(); ++i) out << ',' << g17(tp.x[i]);
    out << '\n';
  }
}

}  // namespace cmpopt
