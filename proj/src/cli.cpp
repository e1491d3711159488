#include "sisgoal/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <Eigen/Core>

#include "CLI11.hpp"

#include "sisgoal/bootstrap.hpp"
#include "sisgoal/pipeline.hpp"
#include "sisgoal/simulation.hpp"

namespace sisgoal {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

OutcomeKind parse_outcome_kind(const std::string& s) {
  if (s == "continuous") return OutcomeKind::continuous;
  if (s == "binary") return OutcomeKind::binary;
  throw std::invalid_argument("outcome kind must be continuous or binary, got '" + s + "'");
}

std::string method_key(Method m) { return m == Method::goal ? "goal" : "oal"; }

PropensityOptions fit_options(const RunConfig& c) {
  PropensityOptions o;
  o.intercept = c.intercept;
  o.clip = c.clip;
  return o;
}

PreparedFeatures load_and_prepare(const RunConfig& c) {
  if (c.input.empty()) throw DataError("--input is required for " + to_string(c.command));
  const Dataset raw = load_csv(c.input, c.roles);
  return prepare_features(raw, {c.q, c.cutoff, Execution::parallel});
}

json positivity_json(const PositivityReport& r) {
  return {{"min_pi_treated", r.min_pi_treated}, {"max_pi_treated", r.max_pi_treated},
          {"min_pi_control", r.min_pi_control}, {"max_pi_control", r.max_pi_control},
          {"n_clipped", r.n_clipped},           {"max_weight", r.max_tau}};
}

std::vector<std::string> selected_names(const SelectionResult& s,
                                        const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (s.selected_mask[j]) out.push_back(names[j]);
  }
  return out;
}

std::vector<std::string> run_screen(const RunConfig& c, const fs::path& out) {
  const PreparedFeatures prep = load_and_prepare(c);

  std::ostringstream scores("feature_name,score\n", std::ios::ate);
  std::ostringstream features("feature_name,kept,removal_reason,rank\n", std::ios::ate);
  std::vector<Index> rank(prep.screening.scores.size());
  for (std::size_t r = 0; r < prep.screening.order.size(); ++r) rank[prep.screening.order[r]] = r + 1;
  Index k = 0;  // position among non-constant features
  for (const FeatureMeta& m : prep.features) {
    const bool constant = m.removal_reason == RemovalReason::constant;
    if (!constant) scores << m.name << ',' << fmt(prep.screening.scores[k]) << '\n';
    features << m.name << ',' << (m.kept ? 1 : 0) << ',' << to_string(m.removal_reason) << ','
             << (constant ? std::string("NA") : std::to_string(rank[k])) << '\n';
    if (!constant) ++k;
  }
  std::string selected;
  for (const auto& name : prep.data.feature_names) selected += name + "\n";

  write_file(out / "scores.csv", scores.str());
  write_file(out / "selected.txt", selected);
  write_file(out / "features.csv", features.str());
  return {"scores.csv", "selected.txt", "features.csv"};
}

std::vector<std::string> run_fit(const RunConfig& c, const fs::path& out) {
  const PreparedFeatures prep = load_and_prepare(c);
  const Method method = c.method.value_or(Method::goal);
  const PipelineEstimate est =
      estimate_ate(prep.data, method, TuningGrid::defaults(), fit_options(c), Execution::parallel);

  std::ostringstream tuning("method,lambda1,lambda2,gamma,wamd,n_selected,converged\n", std::ios::ate);
  for (const TuningRecord& r : est.tuning.report) {
    tuning << method_key(r.method) << ',' << fmt(r.lambda1) << ',' << fmt(r.lambda2) << ','
           << fmt(r.gamma) << ',' << fmt(r.wamd) << ',' << r.n_selected << ','
           << (r.converged ? 1 : 0) << '\n';
  }

  const SelectionResult& best = est.tuning.best;
  const auto& names = prep.data.feature_names;
  json propensity = json::array();
  json outcome = json::array();
  for (std::size_t j = 0; j < names.size(); ++j) {
    propensity.push_back({{"feature", names[j]},
                          {"coefficient", best.alpha(static_cast<Index>(j))},
                          {"selected", static_cast<bool>(best.selected_mask[j])}});
    outcome.push_back({{"feature", names[j]}, {"coefficient", est.outcome.beta(static_cast<Index>(j))}});
  }
  const json coefficients = {
      {"method", to_string(method)},
      {"scale", "standardized features"},
      {"propensity",
       {{"intercept", best.intercept},
        {"lambda1", best.lambda1},
        {"lambda2", best.lambda2},
        {"gamma", best.gamma},
        {"wamd", best.wamd},
        {"converged", best.converged},
        {"n_selected", best.n_selected()},
        {"coefficients", propensity}}},
      {"outcome",
       {{"family", est.outcome.family == Family::binomial ? "binomial" : "gaussian"},
        {"intercept", est.outcome.intercept},
        {"treatment", est.outcome.beta_A},
        {"coefficients", outcome}}}};

  write_file(out / "tuning.csv", tuning.str());
  write_json(out / "coefficients.json", coefficients);
  return {"tuning.csv", "coefficients.json"};
}

std::vector<std::string> run_ate(const RunConfig& c, const fs::path& out) {
  const PreparedFeatures prep = load_and_prepare(c);
  const Method method = c.method.value_or(Method::goal);
  const PipelineEstimate est =
      estimate_ate(prep.data, method, TuningGrid::defaults(), fit_options(c), Execution::parallel);
  const SelectionResult& best = est.tuning.best;
  const json estimate = {{"method", to_string(method)},
                         {"ate", est.sample.ate},
                         {"wamd", est.sample.wamd},
                         {"n", prep.data.n()},
                         {"n_treated", prep.data.n_treated()},
                         {"n_features", prep.data.p()},
                         {"n_selected", best.n_selected()},
                         {"selected", selected_names(best, prep.data.feature_names)},
                         {"lambda1", best.lambda1},
                         {"lambda2", best.lambda2},
                         {"positivity", positivity_json(est.positivity)}};
  write_json(out / "estimate.json", estimate);
  return {"estimate.json"};
}

std::vector<std::string> run_simulate(const RunConfig& c, const fs::path& out) {
  ScenarioConfig sc;
  sc.scenario_id = c.scenario;
  sc.n = c.n;
  sc.p = c.p;
  sc.rho = c.rho;
  sc.beta_A = c.beta_A;
  sc.seed = c.seed;
  sc.q = c.q;
  std::vector<Method> methods;
  if (c.method) {
    methods = {*c.method};
  } else {
    methods = {Method::oal, Method::goal};
  }
  const SimulationRun run = run_replications(sc, methods, c.reps, TuningGrid::defaults(),
                                             fit_options(c), Execution::parallel);

  std::ostringstream reps("replication,seed,method,ate,n_selected,converged\n", std::ios::ate);
  for (const ReplicationResult& rep : run.replications) {
    for (const MethodReplication& mr : rep.methods) {
      const bool ok = rep.ok && mr.ok;
      reps << rep.replication << ',' << rep.seed << ',' << method_key(mr.method) << ','
           << (ok ? fmt(mr.ate) : "NA") << ',' << mr.n_selected << ',' << (ok ? 1 : 0) << '\n';
    }
  }

  json per_method = json::array();
  bool any_success = false;
  for (const SimulationMetrics& m : run.metrics) {
    json inclusion = json::object();
    for (Index j = 0; j < sc.p; ++j) inclusion["X" + std::to_string(j + 1)] = m.inclusion[j];
    const bool summarized = m.n_reps >= 2;
    any_success = any_success || m.n_reps > 0;
    json entry = {{"method", to_string(m.method)},
                  {"n_reps", m.n_reps},
                  {"n_failed", m.n_failed},
                  {"bias", summarized ? json(m.summary.bias) : json(nullptr)},
                  {"se", summarized ? json(m.summary.se) : json(nullptr)},
                  {"mse", summarized ? json(m.summary.mse) : json(nullptr)},
                  {"inclusion_confounders", mean_inclusion(m.inclusion, 0, 2)},
                  {"inclusion_outcome_predictors", mean_inclusion(m.inclusion, 2, 4)},
                  {"inclusion_treatment_predictors", mean_inclusion(m.inclusion, 4, 6)},
                  {"inclusion", inclusion}};
    if (sc.p > 6) {
      entry["inclusion_spurious"] = mean_inclusion(m.inclusion, 6, sc.p);
      entry["inclusion_spurious_screened"] = screened_inclusion(m, 6, sc.p);
    }
    per_method.push_back(std::move(entry));
  }
  const json metrics = {{"scenario", sc.scenario_id}, {"n", sc.n},        {"p", sc.p},
                        {"rho", sc.rho},              {"beta_A", sc.beta_A},
                        {"seed", sc.seed},            {"reps", c.reps},   {"q", run.q},
                        {"methods", per_method}};

  write_file(out / "replications.csv", reps.str());
  write_json(out / "metrics.json", metrics);
  if (!any_success) throw ConvergenceError("every replication failed for every method");
  return {"replications.csv", "metrics.json"};
}

std::vector<std::string> run_bootstrap(const RunConfig& c, const fs::path& out) {
  const PreparedFeatures prep = load_and_prepare(c);
  BootstrapOptions options;
  options.method = c.method.value_or(Method::goal);
  options.B = c.B;
  options.seed = c.seed;
  options.fit = fit_options(c);
  const BootstrapResult r = bootstrap_ate(prep.data, options);
  const TrimmedSummary trimmed = trimmed_summary(r.resample_ates, c.trim_lower, c.trim_upper);

  const json table = {{"method", to_string(r.method)},
                      {"ate", r.point},
                      {"mean", r.boot_mean},
                      {"bias", r.bias},
                      {"se", r.se},
                      {"mse", r.mse},
                      {"ci_lower", r.ci.lower},
                      {"ci_upper", r.ci.upper},
                      {"ci_length", r.ci_length},
                      {"B", r.B},
                      {"succeeded", r.resample_ates.size()},
                      {"excluded", r.excluded},
                      {"trimmed",
                       {{"lower_pct", c.trim_lower},
                        {"upper_pct", c.trim_upper},
                        {"retained", trimmed.retained},
                        {"mean", trimmed.mean},
                        {"sd", trimmed.sd},
                        {"min", trimmed.min},
                        {"max", trimmed.max}}}};

  std::ostringstream inclusion("feature_name,inclusion,percent\n", std::ios::ate);
  for (std::size_t j = 0; j < r.feature_names.size(); ++j) {
    inclusion << r.feature_names[j] << ',' << fmt(r.inclusion_freq[j]) << ','
              << fmt(100.0 * r.inclusion_freq[j]) << '\n';
  }
  write_json(out / "table1.json", table);
  write_file(out / "inclusion.csv", inclusion.str());
  return {"table1.json", "inclusion.csv"};
}

}  // namespace

std::string to_string(Command command) {
  switch (command) {
    case Command::screen: return "screen";
    case Command::fit: return "fit";
    case Command::ate: return "ate";
    case Command::simulate: return "simulate";
    case Command::bootstrap: return "bootstrap";
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::screen, Command::fit, Command::ate, Command::simulate, Command::bootstrap}) {
    if (to_string(c) == name) return c;
  }
  throw std::invalid_argument("unknown command '" + name + "'");
}

json to_json(const RunConfig& c) {
  json roles = {{"treatment", c.roles.treatment},
                {"outcome", c.roles.outcome},
                {"features", c.roles.features},
                {"outcome_kind", c.roles.outcome_kind ? json(to_string(*c.roles.outcome_kind))
                                                      : json(nullptr)}};
  return {{"command", to_string(c.command)},
          {"input", c.input},
          {"roles", roles},
          {"method", c.method ? json(method_key(*c.method)) : json(nullptr)},
          {"q", optional_json(c.q)},
          {"cutoff", optional_json(c.cutoff)},
          {"B", c.B},
          {"seed", c.seed},
          {"out", c.out},
          {"intercept", c.intercept},
          {"clip", c.clip},
          {"trim_lower", c.trim_lower},
          {"trim_upper", c.trim_upper},
          {"threads", c.threads},
          {"scenario", c.scenario},
          {"n", c.n},
          {"p", c.p},
          {"rho", c.rho},
          {"beta_A", c.beta_A},
          {"reps", c.reps}};
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.command = parse_command(j.at("command").get<std::string>());
  c.input = j.value("input", c.input);
  if (j.contains("roles")) {
    const json& r = j.at("roles");
    c.roles.treatment = r.value("treatment", c.roles.treatment);
    c.roles.outcome = r.value("outcome", c.roles.outcome);
    c.roles.features = r.value("features", c.roles.features);
    if (r.contains("outcome_kind") && !r.at("outcome_kind").is_null()) {
      c.roles.outcome_kind = parse_outcome_kind(r.at("outcome_kind").get<std::string>());
    }
  }
  if (j.contains("method") && !j.at("method").is_null()) {
    c.method = parse_method(j.at("method").get<std::string>());
  }
  if (j.contains("q") && !j.at("q").is_null()) c.q = j.at("q").get<Index>();
  if (j.contains("cutoff") && !j.at("cutoff").is_null()) c.cutoff = j.at("cutoff").get<double>();
  c.B = j.value("B", c.B);
  c.seed = j.value("seed", c.seed);
  c.out = j.value("out", c.out);
  c.intercept = j.value("intercept", c.intercept);
  c.clip = j.value("clip", c.clip);
  c.trim_lower = j.value("trim_lower", c.trim_lower);
  c.trim_upper = j.value("trim_upper", c.trim_upper);
  c.threads = j.value("threads", c.threads);
  c.scenario = j.value("scenario", c.scenario);
  c.n = j.value("n", c.n);
  c.p = j.value("p", c.p);
  c.rho = j.value("rho", c.rho);
  c.beta_A = j.value("beta_A", c.beta_A);
  c.reps = j.value("reps", c.reps);
  return c;
}

int run(const RunConfig& config, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if (config.threads < 0) throw std::invalid_argument("--threads must be non-negative");
    if (config.threads > 0) set_worker_count(config.threads);
    if (!(config.clip > 0.0 && config.clip < 0.5)) throw std::invalid_argument("--clip must lie in (0, 0.5)");
    const fs::path out = config.out;
    fs::create_directories(out);

    std::vector<std::string> files;
    switch (config.command) {
      case Command::screen: files = run_screen(config, out); break;
      case Command::fit: files = run_fit(config, out); break;
      case Command::ate: files = run_ate(config, out); break;
      case Command::simulate: files = run_simulate(config, out); break;
      case Command::bootstrap: files = run_bootstrap(config, out); break;
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const json manifest = {
        {"tool", "sisgoal"},
        {"version", kVersion},
        {"config", to_json(config)},
        {"seed", config.seed},
        {"threads", worker_count()},
        {"outputs", files},
        {"libraries",
         {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"compiler", __VERSION__}}},
        {"timings", {{"total_seconds", seconds}}}};
    write_json(out / "manifest.json", manifest);
    return kExitOk;
  } catch (const ConvergenceError& e) {
    err << "sisgoal: no convergence: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const DataError& e) {
    err << "sisgoal: data error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "sisgoal: error: " << e.what() << '\n';
    return kExitDataError;
  }
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Ball-covariance screening, outcome-adaptive lasso selection and IPTW estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  RunConfig cfg;
  std::string method, outcome_kind, manifest_path;
  Index q = 0, B = cfg.B;
  double cutoff = 0.0;
  bool no_intercept = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Output directory")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "Worker threads (default: SISGOAL_THREADS or all cores)");
    sub->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  };
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Input CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--treatment", cfg.roles.treatment, "Treatment column")->capture_default_str();
    sub->add_option("--outcome", cfg.roles.outcome, "Outcome column")->capture_default_str();
    sub->add_option("--features", cfg.roles.features, "Feature columns (default: all others)")
        ->delimiter(',');
    sub->add_option("--outcome-kind", outcome_kind, "continuous or binary (default: inferred)")
        ->check(CLI::IsMember({"continuous", "binary"}));
    sub->add_option("--q", q, "Screening size (default: floor(n / ln n))")->check(CLI::PositiveNumber);
    sub->add_option("--cutoff", cutoff, "Absolute-correlation cutoff for redundant features")
        ->check(CLI::Range(0.0, 1.0));
  };
  auto add_fit = [&](CLI::App* sub) {
    sub->add_option("--method", method, "oal or goal")->check(CLI::IsMember({"oal", "goal"}));
    sub->add_flag("--no-intercept", no_intercept, "Fit the propensity model without an intercept");
    sub->add_option("--clip", cfg.clip, "Propensity clip level")->capture_default_str();
  };

  CLI::App* screen = app.add_subcommand("screen", "Conditional ball-covariance screening");
  add_common(screen);
  add_data(screen);

  CLI::App* fit = app.add_subcommand("fit", "wAMD-tuned propensity fit");
  add_common(fit);
  add_data(fit);
  add_fit(fit);

  CLI::App* ate = app.add_subcommand("ate", "IPTW average treatment effect");
  add_common(ate);
  add_data(ate);
  add_fit(ate);

  CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo simulation study");
  add_common(simulate);
  add_fit(simulate);
  simulate->add_option("--scenario", cfg.scenario, "Scenario 1-4")->check(CLI::Range(1, 4))->capture_default_str();
  simulate->add_option("--n", cfg.n, "Sample size")->capture_default_str();
  simulate->add_option("--p", cfg.p, "Number of features")->capture_default_str();
  simulate->add_option("--rho", cfg.rho, "Pairwise covariate correlation")->capture_default_str();
  simulate->add_option("--beta-a", cfg.beta_A, "True treatment effect")->capture_default_str();
  simulate->add_option("--reps", cfg.reps, "Replications")->capture_default_str();
  simulate->add_option("--q", q, "Screening size override")->check(CLI::PositiveNumber);

  CLI::App* boot = app.add_subcommand("bootstrap", "Bootstrap inference for the ATE");
  add_common(boot);
  add_data(boot);
  add_fit(boot);
  boot->add_option("--B", B, "Bootstrap resamples")->capture_default_str();
  boot->add_option("--trim-lower", cfg.trim_lower, "Lower trim percentile")->capture_default_str();
  boot->add_option("--trim-upper", cfg.trim_upper, "Upper trim percentile")->capture_default_str();

  CLI::App* replay = app.add_subcommand("replay", "Rerun the configuration stored in a manifest");
  replay->add_option("manifest", manifest_path, "manifest.json")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", cfg.out, "Output directory (default: the recorded one)");
  replay->add_option("--threads", cfg.threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitDataError;
  }

  try {
    if (replay->parsed()) {
      std::ifstream f(manifest_path);
      const json manifest = json::parse(f);
      RunConfig recorded = config_from_json(manifest.at("config"));
      if (replay->count("--out") > 0) recorded.out = cfg.out;
      if (replay->count("--threads") > 0) recorded.threads = cfg.threads;
      return run(recorded, std::cerr);
    }

    CLI::App* sub = app.get_subcommands().front();
    cfg.command = parse_command(sub->get_name());
    if (!method.empty()) cfg.method = parse_method(method);
    if (!outcome_kind.empty()) cfg.roles.outcome_kind = parse_outcome_kind(outcome_kind);
    if (sub->count("--q") > 0) cfg.q = q;
    if (sub->get_option_no_throw("--cutoff") && sub->count("--cutoff") > 0) {
      if (!(cutoff > 0.0)) throw std::invalid_argument("--cutoff must lie in (0, 1]");
      cfg.cutoff = cutoff;
    }
    cfg.B = B;
    cfg.intercept = !no_intercept;
  } catch (const std::exception& e) {
    std::cerr << "sisgoal: error: " << e.what() << '\n';
    return kExitDataError;
  }
  return run(cfg, std::cerr);
}

}  // namespace sisgoal
