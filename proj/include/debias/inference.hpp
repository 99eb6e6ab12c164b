#pragma once

// Noise-scale estimation and confidence intervals for a debiased target.

#include "debias/model_core.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <variant>

namespace debias {

/// Phi^{-1}(q).
inline double normal_quantile(double q) {
  detail::require(q > 0.0 && q < 1.0, "normal_quantile: q must lie in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), q);
}

inline double normal_cdf(double x) { return boost::math::cdf(boost::math::normal_distribution<double>(), x); }

/// z_{alpha/2} = Phi^{-1}(1 - alpha/2).
inline double z_half_alpha(double alpha) {
  detail::require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
  return normal_quantile(1.0 - 0.5 * alpha);
}

/// RMS residual of beta_hat on the first half.
inline double estimate_sigma(const Dataset& first, const Vector& beta_hat) {
  first.check();
  detail::require_dims(beta_hat.size() == first.cols(), "estimate_sigma: beta_hat has the wrong length");
  return (first.y - first.X * beta_hat).norm() / std::sqrt(static_cast<double>(first.rows()));
}

enum class CiForm {
  /// sd = sigma_hat sqrt(eta' Sigma_hat eta)
  HalfPower,
  /// sd = sigma_hat |Sigma_hat eta|
  FullPower,
};

struct GaussianInterval {};
struct SubGaussianFloored {
  double c = 0.05;
};

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  double center = 0.0;
  double sd_used = 0.0;
  Index n = 1;
  std::variant<GaussianInterval, SubGaussianFloored> variant;

  double half_width() const { return 0.5 * (upper - lower); }
  bool contains(double x) const { return lower <= x && x <= upper; }
};

/// sqrt(eta' Sigma_hat eta), rejecting clearly negative quadratic forms.
inline double sigma_norm(const Vector& eta, const Matrix& gram) {
  detail::require_dims(gram.rows() == eta.size() && gram.cols() == eta.size(), "sigma_norm: dimension mismatch");
  const double q = eta.dot(gram * eta);
  if (q < -1e-12) throw ConfigError("confidence interval: eta' Sigma_hat eta is negative; Gram matrix is not PSD");
  return std::sqrt(std::max(q, 0.0));
}

/// The standard deviation scale for the requested form (without sigma_hat).
inline double ci_scale(const Vector& eta, const Matrix& gram, CiForm form) {
  if (form == CiForm::HalfPower) return sigma_norm(eta, gram);
  detail::require_dims(gram.rows() == eta.size() && gram.cols() == eta.size(), "ci_scale: dimension mismatch");
  return (gram * eta).norm();
}

namespace detail {

inline ConfidenceInterval make_interval(double center, double sd, double alpha, Index n) {
  require(alpha > 0.0 && alpha < 1.0, "confidence interval: alpha must lie in (0,1)");
  require(n >= 1, "confidence interval: n must be >= 1");
  require(sd >= 0.0 && std::isfinite(sd), "confidence interval: sd must be finite and >= 0");
  const double half = z_half_alpha(alpha) * sd / std::sqrt(static_cast<double>(n));
  ConfidenceInterval ci;
  ci.center = center;
  ci.lower = center - half;
  ci.upper = center + half;
  ci.level = 1.0 - alpha;
  ci.sd_used = sd;
  ci.n = n;
  return ci;
}

}  // namespace detail

/// beta_d ± z_{alpha/2} sd / sqrt(n).
inline ConfidenceInterval confidence_interval(double beta_d, const Vector& eta, const Matrix& gram, double sigma_hat,
                                              double alpha, Index n, CiForm form = CiForm::HalfPower) {
  detail::require(sigma_hat >= 0.0, "confidence interval: sigma_hat must be >= 0");
  return detail::make_interval(beta_d, sigma_hat * ci_scale(eta, gram, form), alpha, n);
}

/// As the Gaussian interval with sd = sigma_hat max(sqrt(eta' Sigma_hat eta), c).
inline ConfidenceInterval confidence_interval_subgaussian(double beta_d, const Vector& eta, const Matrix& gram,
                                                          double sigma_hat, double alpha, Index n, double c) {
  detail::require(c > 0.0, "confidence interval: floor c must be > 0");
  detail::require(sigma_hat >= 0.0, "confidence interval: sigma_hat must be >= 0");
  auto ci = detail::make_interval(beta_d, sigma_hat * std::max(sigma_norm(eta, gram), c), alpha, n);
  ci.variant = SubGaussianFloored{c};
  return ci;
}

// --- Kolmogorov-Smirnov against N(0,1) ----------------------------------------------

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov distribution tail P(K > x).
inline double kolmogorov_tail(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// One-sample KS test of `xs` against the standard normal; the p-value uses
/// the finite-sample scaling (sqrt(n) + 0.12 + 0.11 / sqrt(n)) D.
/// NaN entries are rejected; infinities take CDF values 0 and 1.
inline KsResult ks_test_normal(std::vector<double> xs) {
  KsResult r;
  if (xs.empty()) return r;
  for (double x : xs)
    if (std::isnan(x)) throw ConfigError("ks_test_normal: sample contains NaN");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = std::isinf(xs[i]) ? (xs[i] > 0 ? 1.0 : 0.0) : normal_cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  r.statistic = d;
  const double rn = std::sqrt(n);
  r.p_value = kolmogorov_tail((rn + 0.12 + 0.11 / rn) * d);
  return r;
}

}  // namespace debias
