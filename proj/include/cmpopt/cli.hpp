#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace cmpopt {

enum class Command { EstimateGap, Optimize, Verify, Coeffs };

/// Flat experiment configuration. Optional fields left empty mean "auto".
struct ExperimentConfig {
  Command command = Command::Verify;
  std::string link = "logistic";
  std::optional<double> tau;  ///< auto: B / 2
  double B = 1.0;             ///< gap bound for estimate-gap, coeffs; optimize uses 2 L delta
  std::optional<double> gap;  ///< estimate-gap target gap; auto: B / 2
  std::string objective = "abs1d";
  int dim = 1;
  double box = 5.0;
  int pieces = 5;
  std::uint64_t objective_seed = 0;
  std::vector<double> x0;  ///< empty: all ones
  double delta = 0.1;
  std::optional<double> beta;
  double tol = 1e-8;
  int max_terms = 512;
  std::optional<double> eta;
  std::optional<std::int64_t> T;
  double epsilon = 0.3;
  double Delta0 = 1.0;
  std::optional<double> CDelta;  ///< auto: certified from a second-moment grid
  bool enforce_step_cap = true;
  std::optional<std::int64_t> replicates;  ///< auto: per command
  std::int64_t gradient_replicates = 100000;
  std::uint64_t seed = 0;
  int workers = 0;  ///< 0: hardware concurrency
  std::string output_path = "out";
  std::string suite = "core";
  bool deterministic = false;
};

inline constexpr int kSchemaVersion = 1;

std::string_view to_string(Command c);
Command parse_command(std::string_view name);

/// Applies the keys of a JSON object to `config`. Throws ConfigError naming the key on an
/// unknown key, a wrong type, or a schema_version other than kSchemaVersion.
void apply_config_json(const nlohmann::json& j, ExperimentConfig& config);
ExperimentConfig load_config_file(const std::string& path);

/// Resolved configuration echo (all auto fields filled by the caller where known).
nlohmann::ordered_json to_json(const ExperimentConfig& config);

/// Exit codes: 0 success, 1 failed check or run, 2 configuration error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cmpopt
