// debias: run simulation batches, rebuild Q-Q data, or debias one dataset.
//
//   debias run --config configs/monotone.cfg --out results/monotone
//   debias qq --rows results/monotone/rows.csv --out qq.csv
//   debias debias --data data.csv --scenario nonneg --target 3 --out ci.json
//
// Exit codes: 0 success, 2 configuration or input error, 3 batch failure.

#include "debias/debias.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBatch = 3;

struct RunArgs {
  std::string config;
  std::string out;
  std::optional<long long> reps;
  std::optional<long long> seed;
  std::optional<unsigned> threads;
};

struct QqArgs {
  std::string rows;
  std::string out;
};

struct DebiasArgs {
  std::string data;
  std::string scenario = "monotone";
  long long target = 0;
  double alpha = 0.05;
  bool sub_gaussian = false;
  double ci_floor = 0.05;
  double rho = 1.0;
  long long seed = 1;
  double sigma = 1.0;
  std::optional<double> lasso_radius;
  std::optional<long long> s_u;
  std::optional<double> slope_A;
  std::string out;
};

int cmd_run(const RunArgs& a) {
  debias::ExperimentConfig cfg = debias::load_experiment_config(a.config);
  if (a.reps) cfg.reps = *a.reps;
  if (a.seed) cfg.seed = static_cast<std::uint64_t>(*a.seed);
  if (a.threads) cfg.threads = *a.threads;
  debias::validate(cfg);

  std::filesystem::create_directories(a.out);
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = debias::run_experiment(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  debias::emit_report(report, debias::ReportPaths::in_directory(a.out));

  const auto s = debias::summarize(report);
  std::cout << debias::to_string(cfg.scenario) << " n=" << cfg.n << " p=" << cfg.p << " reps=" << cfg.reps
            << " failures=" << s.failures << " coverage=" << s.coverage << " ks_p=" << s.ks.p_value
            << " seconds=" << secs << "\n";
  if (s.failures == s.reps) {
    std::cerr << "debias: every replication failed; see " << a.out << "/rows.csv\n";
    return kExitBatch;
  }
  return 0;
}

int cmd_qq(const QqArgs& a) {
  std::ifstream in(a.rows);
  if (!in) throw debias::IoError("cannot open '" + a.rows + "' for reading");
  const auto rows = debias::read_rows_csv(in, a.rows);
  if (a.out.empty() || a.out == "-") {
    debias::write_qq_csv(std::cout, rows);
    return 0;
  }
  std::ofstream out(a.out);
  if (!out) throw debias::IoError("cannot open '" + a.out + "' for writing");
  debias::write_qq_csv(out, rows);
  if (!out) throw debias::IoError("write to '" + a.out + "' failed");
  return 0;
}

int cmd_debias(const DebiasArgs& a) {
  const debias::Dataset data = debias::read_dataset_csv(a.data);
  data.check();
  const debias::Index p = data.cols();

  debias::ExperimentConfig cfg;
  cfg.scenario = debias::parse_scenario(a.scenario);
  cfg.p = p;
  cfg.n = data.rows() / 2;
  cfg.covariance = debias::CovarianceSpec{debias::IdentityCov{}, p};
  cfg.noise.kind = debias::GaussianNoise{a.sigma};
  cfg.alpha = a.alpha;
  cfg.sub_gaussian = a.sub_gaussian;
  cfg.ci_floor = a.ci_floor;
  cfg.eta.rho = a.rho;
  cfg.eta.rho_max = std::max(cfg.eta.rho_max, a.rho);
  cfg.seed = static_cast<std::uint64_t>(a.seed);
  cfg.target_index = a.target > 0 ? a.target - 1 : p - 1;
  cfg.lasso_radius = a.lasso_radius;
  if (a.s_u) cfg.slope.s_u = *a.s_u;
  cfg.slope.A = a.slope_A;
  if (cfg.scenario == debias::Scenario::ConstrainedLasso && !cfg.lasso_radius)
    throw debias::ConfigError("--lasso-radius is required for the lasso scenario");
  if ((cfg.scenario == debias::Scenario::Slope || cfg.scenario == debias::Scenario::SqrtSlope) && !a.s_u)
    throw debias::ConfigError("--s-u is required for the slope scenarios");
  debias::validate(cfg);
  if (data.rows() < 4) throw debias::ConfigError("dataset needs at least 4 rows");

  const auto split = debias::split_sample(data, cfg.seed);
  const auto o = debias::analyze_split(cfg, debias::Vector::Zero(p), split);

  nlohmann::ordered_json j;
  j["scenario"] = debias::to_string(cfg.scenario);
  j["target"] = *cfg.target_index + 1;
  j["rows"] = data.rows();
  j["p"] = p;
  j["n_half"] = o.n;
  j["alpha"] = cfg.alpha;
  j["sub_gaussian"] = cfg.sub_gaussian;
  j["pilot"] = o.pilot.beta_hat(*cfg.target_index);
  j["v"] = o.pilot.selection.v(*cfg.target_index);
  j["beta_d"] = o.beta_d;
  j["sigma_hat"] = o.sigma_hat;
  j["sd"] = o.ci.sd_used;
  j["lower"] = o.ci.lower;
  j["upper"] = o.ci.upper;
  j["sd_full_power"] = o.ci_full.sd_used;
  j["lower_full_power"] = o.ci_full.lower;
  j["upper_full_power"] = o.ci_full.upper;
  j["lambda"] = o.eta.lambda;
  j["rho_final"] = o.eta.rho_final;
  j["eta_iterations"] = o.eta.iterations;
  j["pilot_converged"] = o.pilot.converged;

  const std::string text = j.dump(2);
  if (a.out.empty() || a.out == "-") {
    std::cout << text << '\n';
    return 0;
  }
  std::ofstream out(a.out);
  if (!out) throw debias::IoError("cannot open '" + a.out + "' for writing");
  out << text << '\n';
  if (!out) throw debias::IoError("write to '" + a.out + "' failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Debiased inference for constrained and sorted-l1 regression"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a simulation batch from a config file");
  run_cmd->add_option("-c,--config", run.config, "Config file (key = value lines)")->required();
  run_cmd->add_option("-o,--out", run.out, "Output directory for rows.csv, summary.json and qq.csv")->required();
  run_cmd->add_option("--reps", run.reps, "Override reps");
  run_cmd->add_option("--seed", run.seed, "Override seed");
  run_cmd->add_option("--threads", run.threads, "Worker threads (DEBIAS_THREADS also caps this)");

  QqArgs qq;
  auto* qq_cmd = app.add_subcommand("qq", "Rebuild Q-Q data from rows.csv");
  qq_cmd->add_option("-r,--rows", qq.rows, "rows.csv from a run")->required();
  qq_cmd->add_option("-o,--out", qq.out, "Output CSV (default stdout)");

  DebiasArgs db;
  auto* db_cmd = app.add_subcommand("debias", "Debias one coordinate of a dataset CSV (header y,x1,...,xp)");
  db_cmd->add_option("-d,--data", db.data, "Dataset CSV")->required();
  db_cmd->add_option("--scenario", db.scenario, "monotone, positive_monotone, nonneg, lasso, slope or sqrt_slope");
  db_cmd->add_option("--target", db.target, "1-based coordinate (default p)");
  db_cmd->add_option("--alpha", db.alpha, "Interval level is 1 - alpha");
  db_cmd->add_flag("--sub-gaussian", db.sub_gaussian, "Use the floored interval and the row-wise constraint");
  db_cmd->add_option("--ci-floor", db.ci_floor, "Floor c for --sub-gaussian");
  db_cmd->add_option("--rho", db.rho, "Initial tuning constant of the direction search");
  db_cmd->add_option("--seed", db.seed, "Seed of the sample split");
  db_cmd->add_option("--sigma", db.sigma, "Noise level used by the slope penalty");
  db_cmd->add_option("--lasso-radius", db.lasso_radius, "l1 radius of the constrained lasso");
  db_cmd->add_option("--s-u", db.s_u, "Sparsity bound for the slope scenarios");
  db_cmd->add_option("--slope-A", db.slope_A, "Penalty constant for the slope scenarios");
  db_cmd->add_option("-o,--out", db.out, "Output JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*qq_cmd) return cmd_qq(qq);
    return cmd_debias(db);
  } catch (const debias::ConfigError& e) {
    std::cerr << "debias: " << e.what() << '\n';
    return kExitConfig;
  } catch (const debias::DimensionError& e) {
    std::cerr << "debias: " << e.what() << '\n';
    return kExitConfig;
  } catch (const debias::IoError& e) {
    std::cerr << "debias: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "debias: " << e.what() << '\n';
    return kExitBatch;
  }
}
