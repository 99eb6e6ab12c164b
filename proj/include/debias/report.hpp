#pragma once

// Experiment summaries and their on-disk form: rows.csv, summary.json, qq.csv.

#include "debias/dataset_io.hpp"
#include "debias/inference.hpp"
#include "debias/sim_harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace debias {

struct Summary {
  Index reps = 0;
  Index failures = 0;
  double coverage = 0.0;
  double coverage_full = 0.0;
  double stat_mean = 0.0;
  double stat_sd = 0.0;
  KsResult ks;
  KsResult ks_full;
  /// Pilot coordinate error, centered and scaled by its own mean and sd.
  KsResult ks_pilot;
  double mean_error_debiased = 0.0;
  double mean_error_pilot = 0.0;
  Index delta_in_cone = 0;
  Index delta_bound_violations = 0;
  double max_rho_final = 0.0;
};

namespace detail {

inline std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  if (xs.empty()) return {nan(), nan()};
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return {m, xs.size() > 1 ? std::sqrt(s / static_cast<double>(xs.size() - 1)) : 0.0};
}

inline std::vector<double> centered_scaled(std::vector<double> xs) {
  const auto [m, s] = mean_sd(xs);
  if (!(s > 0.0)) return {};
  for (double& x : xs) x = (x - m) / s;
  return xs;
}

}  // namespace detail

inline Summary summarize(const ExperimentReport& report) {
  Summary s;
  s.reps = static_cast<Index>(report.rows.size());
  std::vector<double> stat, stat_full, pilot_err, debiased_err;
  double cov = 0.0, cov_full = 0.0;
  for (const auto& r : report.rows) {
    if (r.failed) {
      ++s.failures;
      s.max_rho_final = std::max(s.max_rho_final, r.rho_final);
      continue;
    }
    stat.push_back(r.stat);
    stat_full.push_back(r.stat_full);
    pilot_err.push_back(r.beta_hat_j - r.beta_star_j);
    debiased_err.push_back(r.beta_d - r.beta_star_j);
    cov += r.covered;
    cov_full += r.covered_full;
    if (r.delta_in_cone) {
      ++s.delta_in_cone;
      if (std::abs(r.delta) > r.delta_bound + 1e-8) ++s.delta_bound_violations;
    }
    s.max_rho_final = std::max(s.max_rho_final, r.rho_final);
  }
  const double ok = static_cast<double>(stat.size());
  s.coverage = ok > 0 ? cov / ok : detail::nan();
  s.coverage_full = ok > 0 ? cov_full / ok : detail::nan();
  std::tie(s.stat_mean, s.stat_sd) = detail::mean_sd(stat);
  s.ks = ks_test_normal(stat);
  s.ks_full = ks_test_normal(stat_full);
  s.ks_pilot = ks_test_normal(detail::centered_scaled(pilot_err));
  s.mean_error_debiased = detail::mean_sd(debiased_err).first;
  s.mean_error_pilot = detail::mean_sd(pilot_err).first;
  return s;
}

// --- rows.csv ----------------------------------------------------------------------

inline const char* kRowsHeader =
    "rep,beta_star_j,v_j,beta_hat_j,beta_d,sigma_hat,sd_used,sd_full,stat,stat_full,lower,upper,covered,"
    "covered_full,delta,delta_bound,delta_in_cone,lambda,width,selected,rho_final,iterations,fit_converged,failed,"
    "error";

inline void write_rows_csv(std::ostream& os, const ExperimentReport& report) {
  os << kRowsHeader << '\n';
  for (const auto& r : report.rows) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << r.rep << ',' << format_double(r.beta_star_j) << ',' << format_double(r.v_j) << ','
       << format_double(r.beta_hat_j) << ',' << format_double(r.beta_d) << ',' << format_double(r.sigma_hat) << ','
       << format_double(r.sd_used) << ',' << format_double(r.sd_full) << ',' << format_double(r.stat) << ','
       << format_double(r.stat_full) << ',' << format_double(r.lower) << ',' << format_double(r.upper) << ','
       << int(r.covered) << ',' << int(r.covered_full) << ',' << format_double(r.delta) << ','
       << format_double(r.delta_bound) << ',' << int(r.delta_in_cone) << ',' << format_double(r.lambda) << ','
       << format_double(r.width) << ',' << r.selected << ',' << format_double(r.rho_final) << ',' << r.iterations
       << ',' << int(r.fit_converged) << ',' << int(r.failed) << ',' << err << '\n';
  }
}

/// Reads rows.csv back into rows; columns are located by header name.
inline std::vector<RepRow> read_rows_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(origin + ": empty file");
  std::vector<std::string> header;
  for (auto f : split_csv_line(line)) header.emplace_back(f);
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw IoError(origin + ": missing column '" + name + "'");
  };
  struct RealCol {
    std::size_t index;
    double RepRow::*field;
  };
  struct FlagCol {
    std::size_t index;
    bool RepRow::*field;
  };
  const std::vector<RealCol> reals = {
      {col("beta_star_j"), &RepRow::beta_star_j}, {col("v_j"), &RepRow::v_j},
      {col("beta_hat_j"), &RepRow::beta_hat_j},   {col("beta_d"), &RepRow::beta_d},
      {col("sigma_hat"), &RepRow::sigma_hat},     {col("sd_used"), &RepRow::sd_used},
      {col("sd_full"), &RepRow::sd_full},         {col("stat"), &RepRow::stat},
      {col("stat_full"), &RepRow::stat_full},     {col("lower"), &RepRow::lower},
      {col("upper"), &RepRow::upper},             {col("delta"), &RepRow::delta},
      {col("delta_bound"), &RepRow::delta_bound}, {col("lambda"), &RepRow::lambda},
      {col("width"), &RepRow::width},             {col("rho_final"), &RepRow::rho_final}};
  const std::vector<FlagCol> flags = {{col("covered"), &RepRow::covered},
                                      {col("covered_full"), &RepRow::covered_full},
                                      {col("delta_in_cone"), &RepRow::delta_in_cone},
                                      {col("fit_converged"), &RepRow::fit_converged},
                                      {col("failed"), &RepRow::failed}};
  const std::size_t c_rep = col("rep"), c_sel = col("selected"), c_iter = col("iterations"), c_err = col("error");
  std::vector<RepRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() < header.size())
      throw IoError(origin + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) + " fields");
    try {
      RepRow r;
      r.rep = static_cast<Index>(parse_double(f[c_rep]));
      r.selected = static_cast<Index>(parse_double(f[c_sel]));
      r.iterations = static_cast<Index>(parse_double(f[c_iter]));
      for (const auto& c : reals) r.*c.field = parse_double(f[c.index]);
      for (const auto& c : flags) r.*c.field = parse_double(f[c.index]) != 0.0;
      r.error = std::string(f[c_err]);
      rows.push_back(r);
    } catch (const IoError& e) {
      throw IoError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

// --- qq.csv ------------------------------------------------------------------------

/// Sorted sample columns against Phi^{-1}((k - 0.5) / m), m = successful rows.
inline void write_qq_csv(std::ostream& os, const std::vector<RepRow>& rows) {
  std::vector<double> stat, full, pilot;
  for (const auto& r : rows) {
    if (r.failed) continue;
    stat.push_back(r.stat);
    full.push_back(r.stat_full);
    pilot.push_back(r.beta_hat_j - r.beta_star_j);
  }
  pilot = detail::centered_scaled(pilot);
  std::sort(stat.begin(), stat.end());
  std::sort(full.begin(), full.end());
  std::sort(pilot.begin(), pilot.end());
  os << "theoretical,stat,stat_full,pilot_scaled\n";
  const std::size_t m = stat.size();
  for (std::size_t k = 0; k < m; ++k) {
    const double q = normal_quantile((static_cast<double>(k) + 0.5) / static_cast<double>(m));
    os << format_double(q) << ',' << format_double(stat[k]) << ',' << format_double(full[k]) << ','
       << (k < pilot.size() ? format_double(pilot[k]) : std::string("nan")) << '\n';
  }
}

// --- summary.json ------------------------------------------------------------------

inline nlohmann::ordered_json summary_json(const ExperimentReport& report) {
  const auto& c = report.config;
  const Summary s = summarize(report);
  auto num = [](double x) -> nlohmann::ordered_json {
    if (std::isfinite(x)) return x;
    return nullptr;
  };
  nlohmann::ordered_json j;
  j["scenario"] = to_string(c.scenario);
  j["n"] = c.n;
  j["p"] = c.p;
  j["reps"] = c.reps;
  j["seed"] = c.seed;
  j["alpha"] = c.alpha;
  j["sigma"] = c.noise.sigma();
  j["sub_gaussian"] = c.sub_gaussian;
  if (c.sub_gaussian) j["ci_floor"] = c.ci_floor;
  j["rho_initial"] = c.eta.rho;
  j["rho_growth"] = c.eta.rho_growth;
  j["rho_prime"] = c.eta.rho_prime;
  j["eta_max_iters"] = c.eta.max_iters;
  if (c.scenario == Scenario::Slope || c.scenario == Scenario::SqrtSlope) {
    j["slope_A"] = c.slope.A.value_or(c.scenario == Scenario::Slope ? kSlopeA : kSqrtSlopeA);
    j["slope_route"] = c.slope.route == SlopeRoute::KnownL1 ? "known_l1" : "sparsity_bound";
  }
  j["failures"] = s.failures;
  j["coverage"] = num(s.coverage);
  j["coverage_full_power"] = num(s.coverage_full);
  j["stat_mean"] = num(s.stat_mean);
  j["stat_sd"] = num(s.stat_sd);
  j["ks_distance"] = num(s.ks.statistic);
  j["ks_p_value"] = num(s.ks.p_value);
  j["ks_distance_full_power"] = num(s.ks_full.statistic);
  j["ks_p_value_full_power"] = num(s.ks_full.p_value);
  j["ks_distance_pilot"] = num(s.ks_pilot.statistic);
  j["ks_p_value_pilot"] = num(s.ks_pilot.p_value);
  j["mean_error_debiased"] = num(s.mean_error_debiased);
  j["mean_error_pilot"] = num(s.mean_error_pilot);
  j["delta_in_cone"] = s.delta_in_cone;
  j["delta_bound_violations"] = s.delta_bound_violations;
  j["max_rho_final"] = s.max_rho_final;
  return j;
}

struct ReportPaths {
  std::string rows;
  std::string summary;
  std::string qq;

  static ReportPaths in_directory(const std::string& dir) {
    namespace fs = std::filesystem;
    return {(fs::path(dir) / "rows.csv").string(), (fs::path(dir) / "summary.json").string(),
            (fs::path(dir) / "qq.csv").string()};
  }
};

inline void emit_report(const ExperimentReport& report, const ReportPaths& paths) {
  auto open = [](const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
  };
  {
    auto out = open(paths.rows);
    write_rows_csv(out, report);
    if (!out) throw IoError("write to '" + paths.rows + "' failed");
  }
  {
    auto out = open(paths.summary);
    out << summary_json(report).dump(2) << '\n';
    if (!out) throw IoError("write to '" + paths.summary + "' failed");
  }
  {
    auto out = open(paths.qq);
    write_qq_csv(out, report.rows);
    if (!out) throw IoError("write to '" + paths.qq + "' failed");
  }
}

}  // namespace debias
