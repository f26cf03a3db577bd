#pragma once

#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "cmpopt/estimator.hpp"
#include "cmpopt/optimizer.hpp"
#include "cmpopt/verify.hpp"

namespace cmpopt {

/// name,n,estimate,se,target,rule,pass
std::string summary_csv_header();
/// Numbers printed with 17 significant digits; names containing commas or quotes are quoted.
std::string summary_csv_row(const MonteCarloCheck& check);
void write_summary_csv(std::ostream& out, const std::vector<MonteCarloCheck>& checks);

nlohmann::ordered_json to_json(const MonteCarloCheck& check);
nlohmann::ordered_json to_json(const CoefficientSeries& series);
nlohmann::ordered_json to_json(const EstimatorConfig& config);
nlohmann::ordered_json to_json(const SGDParams& params, const ResolvedSGD& resolved);
/// Everything except the trace, which goes to its own file.
nlohmann::ordered_json to_json(const RunReport& report);

/// t,x_0,...,x_{d-1}
void write_trace_csv(std::ostream& out, const RunReport& report);

}  // namespace cmpopt
