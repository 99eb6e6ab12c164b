#pragma once

// Replicated simulation experiments: generate, split, fit a pilot, select
// v, solve for eta, debias the target coordinate and record the interval.

#include "debias/debias_engine.hpp"
#include "debias/estimators.hpp"
#include "debias/inference.hpp"
#include "debias/model_core.hpp"
#include "debias/pilot_selection.hpp"
#include "debias/random.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace debias {

enum class Scenario { Monotone, PositiveMonotone, NonNeg, ConstrainedLasso, Slope, SqrtSlope };

/// Which step-one construction the SLOPE families use.
enum class SlopeRoute {
  /// s_u-sparse, l1-maximal point near beta_hat with K the l1 ball through it.
  SparsityBound,
  /// K is the l1 ball of radius |beta_star|_1 and v comes from select_v_l1.
  KnownL1,
};

enum class EtaInit { Zero, Target };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::Monotone: return "monotone";
    case Scenario::PositiveMonotone: return "positive_monotone";
    case Scenario::NonNeg: return "nonneg";
    case Scenario::ConstrainedLasso: return "lasso";
    case Scenario::Slope: return "slope";
    case Scenario::SqrtSlope: return "sqrt_slope";
  }
  return "?";
}

inline Scenario parse_scenario(const std::string& s) {
  for (Scenario k : {Scenario::Monotone, Scenario::PositiveMonotone, Scenario::NonNeg, Scenario::ConstrainedLasso,
                     Scenario::Slope, Scenario::SqrtSlope})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown scenario '" + s +
                    "' (expected monotone, positive_monotone, nonneg, lasso, slope or sqrt_slope)");
}

struct SlopeSettings {
  SlopeRoute route = SlopeRoute::SparsityBound;
  /// Sparsity upper bound; 0 means the number of nonzeros of beta_star.
  Index s_u = 0;
  double gamma = 0.25;
  /// Explicit C; unset means choose_C_slope(n, p, s_u, gamma).
  std::optional<double> C;
  /// Unset means the smallest admissible constant for the family.
  std::optional<double> A;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::Monotone;
  /// Rows in each half; every replication draws 2n rows.
  Index n = 100;
  Index p = 100;
  CovarianceSpec covariance{IdentityCov{}, 100};
  NoiseSpec noise{GaussianNoise{1.0}};
  /// 0-based coordinate; unset means the last one.
  std::optional<Index> target_index;
  std::optional<Vector> contrast;
  Index reps = 100;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  bool sub_gaussian = false;
  double ci_floor = 0.05;
  FitConfig fit;
  EtaConfig eta;
  EtaInit eta_init = EtaInit::Zero;
  SlopeSettings slope;
  /// l1 radius for the constrained LASSO; unset means |beta_star|_1.
  std::optional<double> lasso_radius;
  /// 0 means DEBIAS_THREADS or the hardware concurrency.
  unsigned threads = 0;
};

inline void validate(const ExperimentConfig& cfg) {
  detail::require(cfg.p >= 2, "experiment: p must be >= 2");
  detail::require(cfg.n >= 2, "experiment: n must be >= 2");
  detail::require(cfg.covariance.p == cfg.p, "experiment: covariance dimension must equal p");
  validate(cfg.covariance);
  detail::require(cfg.noise.sigma() >= 0.0, "experiment: sigma must be >= 0");
  detail::require(cfg.reps >= 1, "experiment: reps must be >= 1");
  detail::require(cfg.alpha > 0.0 && cfg.alpha < 1.0, "experiment: alpha must lie in (0,1)");
  detail::require(cfg.ci_floor > 0.0, "experiment: ci_floor must be > 0");
  if (cfg.target_index) detail::require(*cfg.target_index >= 0 && *cfg.target_index < cfg.p, "experiment: target out of range");
  if (cfg.contrast) {
    detail::require(cfg.contrast->size() == cfg.p, "experiment: contrast must have length p");
    detail::require(cfg.contrast->norm() > 0.0, "experiment: contrast must be nonzero");
  }
  detail::require(cfg.slope.s_u >= 0 && cfg.slope.s_u <= cfg.p, "experiment: slope s_u out of range");
  detail::require(cfg.slope.gamma > 0.0 && cfg.slope.gamma < 1.0, "experiment: slope gamma must lie in (0,1)");
  detail::require(!cfg.slope.C || *cfg.slope.C > 0.0, "experiment: slope C must be > 0");
  detail::require(!cfg.slope.A || *cfg.slope.A > 0.0, "experiment: slope A must be > 0");
  detail::require(!cfg.lasso_radius || *cfg.lasso_radius >= 0.0, "experiment: lasso radius must be >= 0");
  validate(cfg.fit);
  validate(cfg.eta);
}

/// Count of the leading block for a percentage given in thousandths, rounded down.
inline Index leading_count(Index p, Index per_mille) { return p * per_mille / 1000; }

/// The true coefficient vector of each scenario. NonNeg draws
/// max(N(0, variance 3), 0) per coordinate from `seed`.
inline Vector build_beta_star(Scenario scenario, Index p, std::uint64_t seed = 0) {
  detail::require(p >= 2, "build_beta_star: p must be >= 2");
  Vector b(p);
  switch (scenario) {
    case Scenario::Monotone: {
      const Index k = leading_count(p, 700);
      b.head(k).setConstant(-1.0);
      b.tail(p - k).setConstant(1.0);
      break;
    }
    case Scenario::PositiveMonotone: {
      const Index k = leading_count(p, 700);
      b.head(k).setZero();
      b.tail(p - k).setConstant(1.0);
      break;
    }
    case Scenario::NonNeg: {
      Engine eng = make_engine(seed);
      std::normal_distribution<double> normal(0.0, std::sqrt(3.0));
      for (Index i = 0; i < p; ++i) b(i) = std::max(normal(eng), 0.0);
      break;
    }
    case Scenario::ConstrainedLasso: {
      const Index k = leading_count(p, 995);
      b.head(k).setZero();
      b.tail(p - k).setConstant(1.0);
      break;
    }
    case Scenario::Slope:
    case Scenario::SqrtSlope: {
      const Index k = leading_count(p, 995);
      b.head(k).setZero();
      for (Index i = k; i < p; ++i) b(i) = static_cast<double>(i - k + 1);
      break;
    }
  }
  return b;
}

struct RepRow {
  Index rep = 0;
  bool failed = false;
  std::string error;
  double beta_star_j = 0.0;
  double v_j = 0.0;
  double beta_hat_j = 0.0;
  double beta_d = 0.0;
  double sigma_hat = 0.0;
  /// sigma_hat times the interval scale actually used (floored in sub-Gaussian mode).
  double sd_used = 0.0;
  /// sigma_hat |Sigma_hat eta|.
  double sd_full = 0.0;
  /// sqrt(n)(beta_d - beta_star_j) / sd_used.
  double stat = 0.0;
  /// sqrt(n)(beta_d - beta_star_j) / sd_full.
  double stat_full = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool covered = false;
  bool covered_full = false;
  double delta = 0.0;
  double delta_bound = 0.0;
  bool delta_in_cone = false;
  double lambda = 0.0;
  double width = 0.0;
  Index selected = 0;
  double rho_final = 0.0;
  Index iterations = 0;
  bool fit_converged = false;
};

struct ExperimentReport {
  ExperimentConfig config;
  Vector beta_star;
  std::vector<RepRow> rows;
};

namespace detail {

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

inline Index default_s_u(const Vector& beta_star) {
  return std::max<Index>(1, (beta_star.array() != 0.0).count());
}

inline Vector experiment_target(const ExperimentConfig& cfg) {
  if (cfg.contrast) return *cfg.contrast;
  return unit_target(cfg.p, cfg.target_index.value_or(cfg.p - 1));
}

struct PilotFit {
  Vector beta_hat;
  PilotSelection selection;
  bool converged = true;
};

inline PilotFit fit_and_select(const ExperimentConfig& cfg, const Vector& beta_star, const Dataset& first) {
  const Index n = first.rows();
  const Index p = cfg.p;
  PilotFit out;
  auto slope_select = [&](const Vector& bh) {
    if (cfg.slope.route == SlopeRoute::KnownL1) return select_v_l1(bh, beta_star.lpNorm<1>(), n);
    const Index s_u = cfg.slope.s_u > 0 ? cfg.slope.s_u : default_s_u(beta_star);
    const double C = cfg.slope.C ? *cfg.slope.C : choose_C_slope(n, p, s_u, cfg.slope.gamma);
    return select_v_slope(bh, s_u, C, n);
  };
  switch (cfg.scenario) {
    case Scenario::Monotone: {
      auto f = fit_constrained_ls(first, ConstraintModel{MonotoneCone{}, p}, cfg.fit);
      out.converged = f.converged;
      out.beta_hat = f.beta;
      out.selection = select_v_monotone(f.beta, n);
      break;
    }
    case Scenario::PositiveMonotone: {
      auto f = fit_constrained_ls(first, ConstraintModel{PositiveMonotoneCone{}, p}, cfg.fit);
      out.converged = f.converged;
      out.beta_hat = f.beta;
      out.selection = select_v_positive_monotone(f.beta, n);
      break;
    }
    case Scenario::NonNeg: {
      auto f = fit_constrained_ls(first, ConstraintModel{NonNegOrthant{}, p}, cfg.fit);
      out.converged = f.converged;
      out.beta_hat = f.beta;
      out.selection = select_v_nonneg(f.beta, n);
      break;
    }
    case Scenario::ConstrainedLasso: {
      const double radius = cfg.lasso_radius.value_or(beta_star.lpNorm<1>());
      auto f = fit_constrained_lasso(first, radius, cfg.fit);
      out.converged = f.converged;
      out.beta_hat = f.beta;
      out.selection = select_v_l1(f.beta, radius, n);
      break;
    }
    case Scenario::Slope: {
      const auto lambdas = slope_lambda(p, n, cfg.noise.sigma(), cfg.slope.A.value_or(kSlopeA));
      auto f = fit_slope(first, lambdas, cfg.fit);
      out.converged = f.converged;
      out.beta_hat = f.beta;
      out.selection = slope_select(f.beta);
      break;
    }
    case Scenario::SqrtSlope: {
      const auto lambdas = slope_lambda(p, n, 1.0, cfg.slope.A.value_or(kSqrtSlopeA));
      auto f = fit_sqrt_slope(first, lambdas, cfg.fit);
      out.converged = f.converged && f.fit.converged;
      out.beta_hat = f.fit.beta;
      out.selection = slope_select(f.fit.beta);
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Everything the pipeline produces from one split sample.
struct SplitOutcome {
  detail::PilotFit pilot;
  EtaResult eta;
  Matrix gram;
  Index n = 0;
  double beta_d = 0.0;
  double sigma_hat = 0.0;
  ConfidenceInterval ci;
  ConfidenceInterval ci_full;
};

/// Pilot fit, direction search, debiasing and intervals on one split.
/// `beta_star` is consulted only where the scenario's constraint set needs it
/// (LASSO radius, SLOPE sparsity bound or known l1 norm) and the config does
/// not already fix it.
inline SplitOutcome analyze_split(const ExperimentConfig& cfg, const Vector& beta_star, const SplitDataset& split) {
  const Vector target = detail::experiment_target(cfg);
  SplitOutcome out;
  out.n = split.second.rows();
  out.pilot = detail::fit_and_select(cfg, beta_star, split.first);
  const auto& sel = out.pilot.selection;
  out.gram = gram_matrix(split.second.X);
  EtaConfig ecfg = cfg.eta;
  if (cfg.eta_init == EtaInit::Target) ecfg.eta0 = target;
  out.eta = cfg.sub_gaussian
                ? solve_eta_subgaussian(out.gram, target, sel.cone_at_v, sel.width, out.n, split.second.X, ecfg)
                : solve_eta(out.gram, target, sel.cone_at_v, sel.width, out.n, ecfg);
  out.beta_d = debias_target(sel.v, out.eta.eta, split.second, target);
  out.sigma_hat = estimate_sigma(split.first, out.pilot.beta_hat);
  out.ci = cfg.sub_gaussian ? confidence_interval_subgaussian(out.beta_d, out.eta.eta, out.gram, out.sigma_hat,
                                                              cfg.alpha, out.n, cfg.ci_floor)
                            : confidence_interval(out.beta_d, out.eta.eta, out.gram, out.sigma_hat, cfg.alpha, out.n,
                                                  CiForm::HalfPower);
  out.ci_full =
      confidence_interval(out.beta_d, out.eta.eta, out.gram, out.sigma_hat, cfg.alpha, out.n, CiForm::FullPower);
  return out;
}

/// One full replication. Errors from the library propagate to the caller.
inline RepRow run_replication(const ExperimentConfig& cfg, const Vector& beta_star, Index rep) {
  const std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep));
  const Vector target = detail::experiment_target(cfg);
  RepRow row;
  row.rep = rep;
  row.beta_star_j = target.dot(beta_star);

  const Dataset data = generate_dataset(beta_star, cfg.covariance, cfg.noise, 2 * cfg.n, derive_seed(rep_seed, 0));
  const SplitDataset split = split_sample(data, derive_seed(rep_seed, 1));
  const SplitOutcome o = analyze_split(cfg, beta_star, split);
  const auto& sel = o.pilot.selection;
  row.fit_converged = o.pilot.converged;
  row.beta_hat_j = target.dot(o.pilot.beta_hat);
  row.v_j = target.dot(sel.v);
  row.width = sel.width;
  row.selected = sel.selected;
  row.rho_final = o.eta.rho_final;
  row.iterations = o.eta.iterations;
  row.lambda = o.eta.lambda;
  row.beta_d = o.beta_d;
  row.sigma_hat = o.sigma_hat;
  if (!(o.ci.sd_used > 0.0) || !(o.ci_full.sd_used > 0.0))
    throw DegenerateFitError("degenerate interval: zero standard deviation (eta = 0 or sigma_hat = 0)");
  row.sd_used = o.ci.sd_used;
  row.sd_full = o.ci_full.sd_used;
  const double rn = std::sqrt(static_cast<double>(o.n));
  row.stat = rn * (row.beta_d - row.beta_star_j) / row.sd_used;
  row.stat_full = rn * (row.beta_d - row.beta_star_j) / row.sd_full;
  row.lower = o.ci.lower;
  row.upper = o.ci.upper;
  row.covered = o.ci.contains(row.beta_star_j);
  row.covered_full = o.ci_full.contains(row.beta_star_j);

  const auto d = delta_diagnostic(o.eta.eta, o.gram, target, sel.v, beta_star, o.n, o.eta.lambda);
  row.delta = d.delta;
  row.delta_bound = d.bound;
  row.delta_in_cone = in_tangent_cone(beta_star - sel.v, sel.cone_at_v);
  return row;
}

inline unsigned worker_count(unsigned requested, Index reps) {
  unsigned w = requested;
  if (w == 0) {
    if (const char* env = std::getenv("DEBIAS_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v > 0) w = static_cast<unsigned>(v);
    }
  }
  if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DEBIAS_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) w = std::min(w, static_cast<unsigned>(cap));
  }
  return static_cast<unsigned>(std::min<Index>(w, reps));
}

/// Runs cfg.reps replications. A replication that raises a library error
/// becomes a failed row; the batch continues.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentReport report;
  report.config = cfg;
  report.beta_star = build_beta_star(cfg.scenario, cfg.p, cfg.seed);
  report.rows.resize(static_cast<std::size_t>(cfg.reps));

  std::atomic<Index> next{0};
  auto work = [&] {
    for (Index r = next++; r < cfg.reps; r = next++) {
      RepRow row;
      try {
        row = run_replication(cfg, report.beta_star, r);
      } catch (const Error& e) {
        row = RepRow{};
        row.rep = r;
        row.failed = true;
        row.error = e.what();
        for (double* f : {&row.beta_star_j, &row.v_j, &row.beta_hat_j, &row.beta_d, &row.sigma_hat, &row.sd_used,
                          &row.sd_full, &row.stat, &row.stat_full, &row.lower, &row.upper, &row.delta,
                          &row.delta_bound, &row.lambda, &row.width})
          *f = detail::nan();
        if (const auto* inf = dynamic_cast<const InfeasibleError*>(&e)) row.rho_final = inf->rho_final();
      }
      report.rows[static_cast<std::size_t>(r)] = std::move(row);
    }
  };
  const unsigned workers = worker_count(cfg.threads, cfg.reps);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < workers; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return report;
}

// --- configuration files -------------------------------------------------------------

/// Parses `key = value` lines; `#` starts a comment.
inline std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

namespace detail {

inline double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
  }
}

inline long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not an integer");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean");
}

}  // namespace detail

/// Builds an ExperimentConfig from key/value pairs. Unknown keys are errors.
inline ExperimentConfig config_from_key_values(const std::map<std::string, std::string>& kv) {
  using detail::to_bool;
  using detail::to_int;
  using detail::to_real;
  ExperimentConfig cfg;
  std::string cov_kind = "identity", noise_kind = "gaussian";
  double cov_rho = 0.4, lam_min = 0.5, lam_max = 2.0, sigma = 1.0;
  std::uint64_t cov_seed = 0;
  std::string step = "inverse_sqrt";
  double step_h = 1.0;
  bool step_h_set = false;

  for (const auto& [k, v] : kv) {
    if (k == "scenario") cfg.scenario = parse_scenario(v);
    else if (k == "n") cfg.n = to_int(k, v);
    else if (k == "p") cfg.p = to_int(k, v);
    else if (k == "covariance") cov_kind = v;
    else if (k == "cov_rho") cov_rho = to_real(k, v);
    else if (k == "cov_lambda_min") lam_min = to_real(k, v);
    else if (k == "cov_lambda_max") lam_max = to_real(k, v);
    else if (k == "cov_seed") cov_seed = static_cast<std::uint64_t>(to_int(k, v));
    else if (k == "noise") noise_kind = v;
    else if (k == "sigma") sigma = to_real(k, v);
    else if (k == "target") cfg.target_index = to_int(k, v) - 1;
    else if (k == "contrast") {
      std::vector<double> xs;
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) xs.push_back(to_real(k, item));
      cfg.contrast = Eigen::Map<Vector>(xs.data(), static_cast<Index>(xs.size()));
    }
    else if (k == "reps") cfg.reps = to_int(k, v);
    else if (k == "alpha") cfg.alpha = to_real(k, v);
    else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(k, v));
    else if (k == "sub_gaussian") cfg.sub_gaussian = to_bool(k, v);
    else if (k == "ci_floor") cfg.ci_floor = to_real(k, v);
    else if (k == "fit_max_iters") cfg.fit.max_iters = to_int(k, v);
    else if (k == "fit_tol") cfg.fit.tol = to_real(k, v);
    else if (k == "fit_step") cfg.fit.step_size = to_real(k, v);
    else if (k == "rho") cfg.eta.rho = to_real(k, v);
    else if (k == "rho_growth") cfg.eta.rho_growth = to_real(k, v);
    else if (k == "rho_max") cfg.eta.rho_max = to_real(k, v);
    else if (k == "rho_prime") cfg.eta.rho_prime = to_real(k, v);
    else if (k == "step") step = v;
    else if (k == "step_h") { step_h = to_real(k, v); step_h_set = true; }
    else if (k == "eta_max_iters") cfg.eta.max_iters = to_int(k, v);
    else if (k == "eta_patience") cfg.eta.feasibility_patience = to_int(k, v);
    else if (k == "eta_stall_window") cfg.eta.stall_window = to_int(k, v);
    else if (k == "eta_stall_tol") cfg.eta.stall_tol = to_real(k, v);
    else if (k == "eta_init") {
      if (v == "zero") cfg.eta_init = EtaInit::Zero;
      else if (v == "target") cfg.eta_init = EtaInit::Target;
      else throw ConfigError("config key 'eta_init': expected zero or target");
    }
    else if (k == "slope_route") {
      if (v == "sparsity_bound") cfg.slope.route = SlopeRoute::SparsityBound;
      else if (v == "known_l1") cfg.slope.route = SlopeRoute::KnownL1;
      else throw ConfigError("config key 'slope_route': expected sparsity_bound or known_l1");
    }
    else if (k == "slope_s_u") cfg.slope.s_u = to_int(k, v);
    else if (k == "slope_gamma") cfg.slope.gamma = to_real(k, v);
    else if (k == "slope_C") cfg.slope.C = to_real(k, v);
    else if (k == "slope_A") cfg.slope.A = to_real(k, v);
    else if (k == "lasso_radius") cfg.lasso_radius = to_real(k, v);
    else if (k == "threads") cfg.threads = static_cast<unsigned>(to_int(k, v));
    else throw ConfigError("unknown config key '" + k + "'");
  }

  cfg.covariance.p = cfg.p;
  if (cov_kind == "identity") cfg.covariance.kind = IdentityCov{};
  else if (cov_kind == "toeplitz") cfg.covariance.kind = ToeplitzCov{cov_rho};
  else if (cov_kind == "bounded_eig") cfg.covariance.kind = BoundedEigCov{lam_min, lam_max, cov_seed};
  else throw ConfigError("config key 'covariance': expected identity, toeplitz or bounded_eig");

  if (noise_kind == "gaussian") cfg.noise.kind = GaussianNoise{sigma};
  else if (noise_kind == "rademacher") cfg.noise.kind = ScaledRademacherNoise{sigma};
  else if (noise_kind == "uniform") cfg.noise.kind = UniformCenteredNoise{sigma};
  else throw ConfigError("config key 'noise': expected gaussian, rademacher or uniform");

  if (step == "inverse_sqrt") cfg.eta.step = InverseSqrtStep{step_h};
  else if (step == "constant") cfg.eta.step = ConstantStep{step_h_set ? step_h : 1e-2};
  else throw ConfigError("config key 'step': expected inverse_sqrt or constant");

  validate(cfg);
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return config_from_key_values(parse_key_values(in, path));
}

}  // namespace debias
