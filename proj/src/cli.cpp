#include "cmpopt/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <sstream>
#include <thread>

#include "cmpopt/errors.hpp"
#include "cmpopt/report.hpp"

namespace cmpopt {

namespace {

using ojson = nlohmann::ordered_json;

template <class T>
T get_as(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(fmt::format("config key '{}' has the wrong type", key));
  }
}

template <class T>
std::optional<T> get_auto(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) {
    if (v.get<std::string>() == "auto") return std::nullopt;
    throw ConfigError(fmt::format("config key '{}' must be a number or \"auto\"", key));
  }
  return get_as<T>(v, key);
}

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("--{}: '{}' is not a number", key, item));
    }
  }
  return out;
}

std::optional<double> auto_or_double(const std::string& s, const std::string& key) {
  if (s == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("--{}: expected a number or auto, got '{}'", key, s));
}

struct Outputs {
  std::filesystem::path dir;
  std::vector<ojson> records;
  std::vector<MonteCarloCheck> checks;
};

void write_outputs(const Outputs& o) {
  std::filesystem::create_directories(o.dir);
  std::ofstream jl(o.dir / "report.jsonl", std::ios::binary);
  for (const auto& r : o.records) jl << r.dump() << '\n';
  for (const auto& c : o.checks) jl << to_json(c).dump() << '\n';
  std::ofstream csv(o.dir / "summary.csv", std::ios::binary);
  write_summary_csv(csv, o.checks);
  if (!jl || !csv) throw ConfigError("cannot write reports to " + o.dir.string());
}

bool all_passed(const std::vector<MonteCarloCheck>& checks) {
  for (const auto& c : checks)
    if (!c.passed()) return false;
  return true;
}

void print_checks(std::ostream& out, const std::vector<MonteCarloCheck>& checks) {
  for (const auto& c : checks)
    out << fmt::format("{:<4} {:<48} estimate={:.6g} se={:.3g} target={:.6g} [{}]\n", c.passed() ? "PASS" : "FAIL",
                       c.name, c.estimate, c.se, c.target, c.rule_label());
}

LinkSpec link_of(const ExperimentConfig& c, double B) {
  return LinkSpec{parse_link_kind(c.link), c.tau.value_or(0.5 * B)};
}

Objective make_objective(const ExperimentConfig& c) {
  switch (parse_objective_kind(c.objective)) {
    case ObjectiveKind::Abs1D:
      if (c.dim != 1) throw ConfigError("config key 'dim' must be 1 for objective abs1d");
      return Objective::abs1d();
    case ObjectiveKind::L1Norm:
      return Objective::l1_norm(c.dim);
    case ObjectiveKind::MaxAffine:
      return Objective::random_max_affine(c.dim, c.pieces, c.objective_seed);
    case ObjectiveKind::SmoothQuadratic:
      return Objective::smooth_quadratic(c.dim, c.box);
  }
  throw ConfigError("unknown objective");
}

std::int64_t replicates_or(const ExperimentConfig& c, std::int64_t fallback) {
  const std::int64_t n = c.replicates.value_or(fallback);
  if (n < 2) throw ConfigError("config key 'replicates' must be >= 2");
  return n;
}

// The first record is the config echo; fill the fields that were "auto".
void resolve_echo(Outputs& o, const EstimatorConfig& cfg) {
  o.records.front()["tau"] = cfg.link.tau;
  o.records.front()["beta"] = cfg.schedule.beta;
}

int cmd_coeffs(const ExperimentConfig& c, std::ostream& out, Outputs& o) {
  const EstimatorConfig cfg = make_config(link_of(c, c.B), c.B, c.tol, c.max_terms, c.beta);
  o.records.push_back({{"record", "estimator"}, {"estimator", to_json(cfg)}});
  resolve_echo(o, cfg);
  const auto& s = cfg.series;
  out << fmt::format("link={} tau={:g} B={:g} alpha={:.17g} beta={:.17g}\n", c.link, cfg.link.tau, c.B,
                     cfg.interval.alpha, cfg.schedule.beta);
  out << fmt::format("terms={} sup_residual={:.3e} decay_C={:.6g} decay_rho={:.6g}\n", s.size(), s.sup_residual,
                     s.decay_C, s.decay_rho);
  out << "k,degree,coefficient\n";
  for (int k = 1; k <= s.size(); ++k) {
    out << fmt::format("{},{},{:.17g}\n", k, s.degree(k), s.coefficients[k - 1]);
    o.records.push_back({{"record", "coefficient"}, {"k", k}, {"degree", s.degree(k)}, {"value", s.coefficients[k - 1]}});
  }
  MonteCarloCheck fit;
  fit.name = fmt::format("fit_residual[{}]", c.link);
  fit.n = 40 * s.size() + 1;
  fit.estimate = s.sup_residual;
  fit.target = cfg.path() == EstimatorPath::Logistic ? s.sup_residual : c.tol;
  fit.rule = ToleranceRule::AtMost;
  fit.provenance = "closed-form";
  o.checks.push_back(fit);
  return 0;
}

int cmd_estimate_gap(const ExperimentConfig& c, std::ostream& out, Outputs& o) {
  const EstimatorConfig cfg = make_config(link_of(c, c.B), c.B, c.tol, c.max_terms, c.beta);
  o.records.push_back({{"record", "estimator"}, {"estimator", to_json(cfg)}});
  const double gap = c.gap.value_or(0.5 * c.B);
  const std::int64_t n = replicates_or(c, 100000);
  resolve_echo(o, cfg);
  o.records.front()["gap"] = gap;
  o.records.front()["replicates"] = n;
  const VerifyContext ctx{c.seed, c.workers};
  o.checks = check_unbiasedness(cfg, {gap}, n, ctx, c.link);
  o.checks.push_back(check_cost(cfg.schedule, cfg.path(), n, ctx));
  print_checks(out, o.checks);
  return all_passed(o.checks) ? 0 : 1;
}

int cmd_verify(const ExperimentConfig& c, std::ostream& out, Outputs& o) {
  if (c.suite != "core") throw ConfigError(fmt::format("config key 'suite': unknown suite '{}'", c.suite));
  SuiteOptions opt;
  opt.replicates = replicates_or(c, opt.replicates);
  opt.gradient_replicates = c.gradient_replicates;
  o.records.front()["replicates"] = opt.replicates;
  const SuiteResult r = run_core_suite({c.seed, c.workers}, opt);
  o.records.push_back({{"record", "certified"}, {"CDelta", r.certified_c_delta}, {"note",
                       "grid maximum of E[gap^2]/B^2 at gap=B; a lower bound on the uniform constant"}});
  o.checks = r.checks;
  print_checks(out, o.checks);
  out << fmt::format("{} / {} checks passed; certified CDelta = {:.6g}\n",
                     std::count_if(o.checks.begin(), o.checks.end(), [](const auto& k) { return k.passed(); }),
                     o.checks.size(), r.certified_c_delta);
  return all_passed(o.checks) ? 0 : 1;
}

int cmd_optimize(const ExperimentConfig& c, std::ostream& out, Outputs& o) {
  const Objective f = make_objective(c);
  const double B = 2.0 * f.lipschitz() * c.delta;
  if (!(B > 0.0)) throw ConfigError("objective has Lipschitz constant 0; nothing to optimize");
  const EstimatorConfig cfg = make_config(link_of(c, B), B, c.tol, c.max_terms, c.beta);
  double c_delta = 0.0;
  if (c.CDelta) {
    c_delta = *c.CDelta;
  } else {
    const std::vector<double> grid{B / 8.0, B / 4.0, B / 2.0, B};
    const SecondMomentScaling sm = check_second_moment_scaling(cfg.link.kind, grid, cfg.schedule.beta,
                                                               replicates_or(c, 100000), {c.seed, c.workers},
                                                               cfg.link.tau / B, c.tol, c.max_terms);
    c_delta = sm.c_delta;
    o.checks.push_back(sm.slope);
  }
  SGDParams p;
  p.eta = c.eta;
  p.iterations = c.T;
  p.epsilon = c.epsilon;
  p.delta = c.delta;
  p.delta0 = c.Delta0;
  p.c_delta = c_delta;
  p.seed = c.seed;
  p.enforce_step_cap = c.enforce_step_cap;
  Eigen::VectorXd x0 = Eigen::VectorXd::Ones(f.dimension());
  if (!c.x0.empty()) {
    if (static_cast<int>(c.x0.size()) != f.dimension())
      throw ConfigError(fmt::format("config key 'x0' has {} entries, objective dimension is {}", c.x0.size(),
                                    f.dimension()));
    x0 = Eigen::Map<const Eigen::VectorXd>(c.x0.data(), f.dimension());
  }
  const auto t0 = std::chrono::steady_clock::now();
  const RunReport rep = run(f, p, cfg, x0);
  resolve_echo(o, cfg);
  o.records.front()["B"] = B;
  o.records.front()["eta"] = rep.resolved.eta;
  o.records.front()["T"] = rep.resolved.iterations;
  o.records.front()["CDelta"] = c_delta;
  o.records.front()["x0"] = std::vector<double>(x0.data(), x0.data() + x0.size());
  ojson rj = to_json(rep);
  rj["objective"] = f.describe();
  if (!c.deterministic) rj["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.records.push_back(rj);

  MonteCarloCheck st;
  st.name = "stationarity[x_R]";
  st.n = p.diagnostic_samples;
  st.estimate = rep.stationarity;
  st.se = rep.stationarity_se;
  st.target = c.epsilon;
  st.rule = ToleranceRule::AtMost;
  st.provenance = "mc-oracle";
  o.checks.push_back(st);

  std::filesystem::create_directories(o.dir);
  std::ofstream trace(o.dir / "trace.csv", std::ios::binary);
  write_trace_csv(trace, rep);

  out << fmt::format("T={} eta={:.6g} CDelta={:.6g} R={} comparisons={} ({:.4g}/iter, predicted {:.4g})\n",
                     rep.resolved.iterations, rep.resolved.eta, c_delta, rep.R, rep.total_comparisons,
                     rep.mean_cost_per_iteration, rep.predicted_cost);
  out << fmt::format("||grad f_delta(x_R)|| = {:.6g} +- {:.3g}; trace average {:.6g}; target {:g}\n", rep.stationarity,
                     rep.stationarity_se, rep.trace_stationarity, c.epsilon);
  print_checks(out, o.checks);
  return all_passed(o.checks) ? 0 : 1;
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::EstimateGap:
      return "estimate-gap";
    case Command::Optimize:
      return "optimize";
    case Command::Verify:
      return "verify";
    case Command::Coeffs:
      return "coeffs";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  if (name == "estimate-gap") return Command::EstimateGap;
  if (name == "optimize") return Command::Optimize;
  if (name == "verify") return Command::Verify;
  if (name == "coeffs") return Command::Coeffs;
  throw ConfigError("config key 'command': unknown command '" + std::string(name) + "'");
}

void apply_config_json(const nlohmann::json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  if (!j.contains("schema_version")) throw ConfigError("config key 'schema_version' is required");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const auto& v = it.value();
    if (k == "schema_version") {
      if (get_as<int>(v, k) != kSchemaVersion)
        throw ConfigError(fmt::format("config key 'schema_version': expected {}", kSchemaVersion));
    } else if (k == "command") {
      c.command = parse_command(get_as<std::string>(v, k));
    } else if (k == "link") {
      c.link = get_as<std::string>(v, k);
    } else if (k == "tau") {
      c.tau = get_auto<double>(v, k);
    } else if (k == "B") {
      c.B = get_as<double>(v, k);
    } else if (k == "gap") {
      c.gap = get_auto<double>(v, k);
    } else if (k == "objective") {
      c.objective = get_as<std::string>(v, k);
    } else if (k == "dim") {
      c.dim = get_as<int>(v, k);
    } else if (k == "box") {
      c.box = get_as<double>(v, k);
    } else if (k == "pieces") {
      c.pieces = get_as<int>(v, k);
    } else if (k == "objective_seed") {
      c.objective_seed = get_as<std::uint64_t>(v, k);
    } else if (k == "x0") {
      c.x0 = get_as<std::vector<double>>(v, k);
    } else if (k == "delta") {
      c.delta = get_as<double>(v, k);
    } else if (k == "beta") {
      c.beta = get_auto<double>(v, k);
    } else if (k == "tol") {
      c.tol = get_as<double>(v, k);
    } else if (k == "max_terms") {
      c.max_terms = get_as<int>(v, k);
    } else if (k == "eta") {
      c.eta = get_auto<double>(v, k);
    } else if (k == "T") {
      c.T = get_auto<std::int64_t>(v, k);
    } else if (k == "epsilon") {
      c.epsilon = get_as<double>(v, k);
    } else if (k == "Delta0") {
      c.Delta0 = get_as<double>(v, k);
    } else if (k == "CDelta") {
      c.CDelta = get_auto<double>(v, k);
    } else if (k == "enforce_step_cap") {
      c.enforce_step_cap = get_as<bool>(v, k);
    } else if (k == "replicates") {
      c.replicates = get_auto<std::int64_t>(v, k);
    } else if (k == "gradient_replicates") {
      c.gradient_replicates = get_as<std::int64_t>(v, k);
    } else if (k == "seed") {
      c.seed = get_as<std::uint64_t>(v, k);
    } else if (k == "workers") {
      c.workers = get_as<int>(v, k);
    } else if (k == "output_path") {
      c.output_path = get_as<std::string>(v, k);
    } else if (k == "suite") {
      c.suite = get_as<std::string>(v, k);
    } else if (k == "deterministic") {
      c.deterministic = get_as<bool>(v, k);
    } else {
      throw ConfigError(fmt::format("unknown config key '{}'", k));
    }
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("config file {}: {}", path, e.what()));
  }
  ExperimentConfig c;
  apply_config_json(j, c);
  return c;
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  auto opt = [](const auto& v) -> ojson {
    if (v) return *v;
    return "auto";
  };
  ojson j;
  j["record"] = "config";
  j["schema_version"] = kSchemaVersion;
  j["command"] = std::string(to_string(c.command));
  j["link"] = c.link;
  j["tau"] = opt(c.tau);
  j["B"] = c.B;
  j["gap"] = opt(c.gap);
  j["objective"] = c.objective;
  j["dim"] = c.dim;
  j["box"] = c.box;
  j["pieces"] = c.pieces;
  j["objective_seed"] = c.objective_seed;
  j["x0"] = c.x0;
  j["delta"] = c.delta;
  j["beta"] = opt(c.beta);
  j["tol"] = c.tol;
  j["max_terms"] = c.max_terms;
  j["eta"] = opt(c.eta);
  j["T"] = opt(c.T);
  j["epsilon"] = c.epsilon;
  j["Delta0"] = c.Delta0;
  j["CDelta"] = opt(c.CDelta);
  j["enforce_step_cap"] = c.enforce_step_cap;
  j["replicates"] = opt(c.replicates);
  j["gradient_replicates"] = c.gradient_replicates;
  j["seed"] = c.seed;
  j["output_path"] = c.output_path;
  j["suite"] = c.suite;
  return j;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Comparison-oracle optimization: gap estimation, SGD and verification"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path, link, objective, out_dir, suite, x0, beta, eta, T, tau, cdelta;
  std::uint64_t seed = 0;
  int workers = 0, dim = 0, max_terms = 0;
  double delta = 0, epsilon = 0, B = 0, tol = 0, gap = 0, delta0 = 0, box = 0;
  std::int64_t replicates = 0;
  bool deterministic = false;

  app.add_option("--config", config_path, "JSON config file");
  auto* o_seed = app.add_option("--seed", seed, "master seed");
  auto* o_workers = app.add_option("--workers", workers, "worker threads (never changes results)");
  app.add_flag("--deterministic", deterministic, "omit timestamps and wall-clock fields");
  auto* o_link = app.add_option("--link", link, "logistic | probit | cauchit");
  auto* o_beta = app.add_option("--beta", beta, "truncation parameter or auto");
  auto* o_delta = app.add_option("--delta", delta, "smoothing radius");
  auto* o_eps = app.add_option("--epsilon", epsilon, "stationarity target");
  auto* o_T = app.add_option("--T", T, "iterations or auto");
  auto* o_eta = app.add_option("--eta", eta, "step size or auto");
  auto* o_tau = app.add_option("--tau", tau, "link temperature or auto (B/2)");
  auto* o_B = app.add_option("--B", B, "gap bound");
  auto* o_gap = app.add_option("--gap", gap, "gap for estimate-gap");
  auto* o_tol = app.add_option("--tol", tol, "coefficient fit tolerance");
  auto* o_mt = app.add_option("--max-terms", max_terms, "maximum number of series terms");
  auto* o_obj = app.add_option("--objective", objective, "abs1d | l1norm | maxaffine | quadratic");
  auto* o_dim = app.add_option("--dim", dim, "objective dimension");
  auto* o_box = app.add_option("--box", box, "quadratic box radius");
  auto* o_x0 = app.add_option("--x0", x0, "starting point, comma separated");
  auto* o_d0 = app.add_option("--Delta0", delta0, "bound on f_delta(x0) - inf f_delta");
  auto* o_cd = app.add_option("--CDelta", cdelta, "second-moment constant or auto");
  auto* o_rep = app.add_option("--replicates", replicates, "Monte Carlo replicates");
  auto* o_out = app.add_option("--out", out_dir, "output directory");
  auto* o_suite = app.add_option("--suite", suite, "verification suite");

  app.add_subcommand("estimate-gap", "Monte Carlo of the gap estimator at one gap");
  app.add_subcommand("optimize", "comparison-SGD run");
  app.add_subcommand("verify", "statistical verification suite");
  app.add_subcommand("coeffs", "fit and print inverse-link coefficients");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config_file(config_path);
    c.command = parse_command(app.get_subcommands().front()->get_name());
    if (c.workers < 1) c.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (*o_seed) c.seed = seed;
    if (*o_workers) c.workers = workers;
    if (deterministic) c.deterministic = true;
    if (*o_link) c.link = link;
    if (*o_beta) c.beta = auto_or_double(beta, "beta");
    if (*o_delta) c.delta = delta;
    if (*o_eps) c.epsilon = epsilon;
    if (*o_T) {
      const auto v = auto_or_double(T, "T");
      c.T = v ? std::optional<std::int64_t>(static_cast<std::int64_t>(*v)) : std::nullopt;
    }
    if (*o_eta) c.eta = auto_or_double(eta, "eta");
    if (*o_tau) c.tau = auto_or_double(tau, "tau");
    if (*o_B) c.B = B;
    if (*o_gap) c.gap = gap;
    if (*o_tol) c.tol = tol;
    if (*o_mt) c.max_terms = max_terms;
    if (*o_obj) c.objective = objective;
    if (*o_dim) c.dim = dim;
    if (*o_box) c.box = box;
    if (*o_x0) c.x0 = parse_list(x0, "x0");
    if (*o_d0) c.Delta0 = delta0;
    if (*o_cd) c.CDelta = auto_or_double(cdelta, "CDelta");
    if (*o_rep) c.replicates = replicates;
    if (*o_out) c.output_path = out_dir;
    if (*o_suite) c.suite = suite;
    if (c.workers < 1) throw ConfigError("config key 'workers' must be >= 1");

    Outputs o;
    o.dir = c.output_path;
    ojson echo = to_json(c);
    if (!c.deterministic) echo["timestamp"] = static_cast<std::int64_t>(std::time(nullptr));
    o.records.push_back(echo);
    int code = 0;
    switch (c.command) {
      case Command::Coeffs:
        code = cmd_coeffs(c, out, o);
        break;
      case Command::EstimateGap:
        code = cmd_estimate_gap(c, out, o);
        break;
      case Command::Verify:
        code = cmd_verify(c, out, o);
        break;
      case Command::Optimize:
        code = cmd_optimize(c, out, o);
        break;
    }
    write_outputs(o);
    return code;
  } catch (const RunFailure& e) {
    err << "run failed: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const ValidityError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const FitFailure& e) {
    err << "configuration error: " << e.what() << " (best residual " << e.best_residual() << ")\n";
    return 2;
  } catch (const BudgetTooLarge& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cmpopt
