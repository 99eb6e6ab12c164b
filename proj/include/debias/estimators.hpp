#pragma once

// Pilot estimators: constrained least squares over the cone families and
// the l1 ball, SLOPE and square-root SLOPE. All least-squares fits share one
// accelerated proximal-gradient driver on the Gram form of the loss
//   f(b) = (1/n) |y - X b|^2 = b'G b - 2 c'b + |y|^2/n,  G = X'X/n, c = X'y/n.

#include "debias/cone_geometry.hpp"
#include "debias/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace debias {

struct FitConfig {
  Index max_iters = 50000;
  /// Fixed step; unset means 1/L with L = 2 lambda_max(X'X/n).
  std::optional<double> step_size;
  /// Relative objective change that ends the iteration.
  double tol = 1e-9;
  std::uint64_t seed = 0;
  /// Square-root SLOPE alternation: relative change in beta and sigma.
  double outer_tol = 1e-7;
  Index max_outer = 500;
  double sigma_floor = 1e-8;
  bool record_trace = false;
};

inline void validate(const FitConfig& cfg) {
  detail::require(cfg.max_iters >= 1, "fit: max_iters must be >= 1");
  detail::require(cfg.tol > 0.0, "fit: tol must be > 0");
  detail::require(!cfg.step_size || *cfg.step_size > 0.0, "fit: step size must be > 0");
  detail::require(cfg.outer_tol > 0.0 && cfg.max_outer >= 1, "fit: invalid outer iteration settings");
}

struct FitResult {
  Vector beta;
  double objective = 0.0;
  /// Norm of the gradient mapping L (b - prox(b - grad/L)) at the output.
  double stationarity = 0.0;
  Index iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

struct SqrtSlopeResult {
  FitResult fit;
  double sigma = 0.0;
  Index outer_iterations = 0;
  bool converged = false;
};

/// Nonincreasing SLOPE weights and the constant A they were built from.
struct SlopeLambdas {
  Vector values;
  double A = 0.0;
};

/// lambda_i = A sigma sqrt(log(2p/i) / n), i = 1..p.
inline SlopeLambdas slope_lambda(Index p, Index n, double sigma, double A) {
  detail::require(p >= 1 && n >= 1, "slope_lambda: p and n must be >= 1");
  detail::require(A > 0.0, "slope_lambda: A must be > 0");
  detail::require(sigma >= 0.0, "slope_lambda: sigma must be >= 0");
  SlopeLambdas out;
  out.A = A;
  out.values.resize(p);
  for (Index i = 1; i <= p; ++i)
    out.values(i - 1) = A * sigma * std::sqrt(std::log(2.0 * static_cast<double>(p) / static_cast<double>(i)) /
                                              static_cast<double>(n));
  return out;
}

inline constexpr double kSlopeA = 2.0 * (4.0 + 1.4142135623730951);
inline constexpr double kSqrtSlopeA = 4.0 * (4.0 + 1.4142135623730951);

namespace detail {

inline void check_lambdas(const Vector& lambdas) {
  for (Index i = 0; i < lambdas.size(); ++i) {
    require(lambdas(i) >= 0.0, "slope weights must be >= 0");
    require(i == 0 || lambdas(i) <= lambdas(i - 1), "slope weights must be nonincreasing");
  }
}

/// Indices ordered by decreasing |v|; ties keep the lower index first.
inline std::vector<Index> order_by_magnitude(const Vector& v) {
  std::vector<Index> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return std::abs(v(a)) > std::abs(v(b)); });
  return idx;
}

inline double sorted_l1_norm(const Vector& b, const Vector& lambdas) {
  std::vector<double> mag(static_cast<std::size_t>(b.size()));
  for (Index i = 0; i < b.size(); ++i) mag[static_cast<std::size_t>(i)] = std::abs(b(i));
  std::sort(mag.begin(), mag.end(), std::greater<>());
  double s = 0.0;
  for (Index i = 0; i < b.size(); ++i) s += lambdas(i) * mag[static_cast<std::size_t>(i)];
  return s;
}

/// Least-squares loss in Gram form.
struct QuadraticLoss {
  Matrix G;
  Vector c;
  double yy = 0.0;
  double lipschitz = 0.0;

  explicit QuadraticLoss(const Dataset& d) {
    d.check();
    G = gram_matrix(d.X);
    c = d.X.transpose() * d.y / static_cast<double>(d.rows());
    yy = d.y.squaredNorm() / static_cast<double>(d.rows());
    lipschitz = 2.0 * largest_eigenvalue(G);
  }

  /// f and grad f at b, sharing one product G b.
  double value_and_grad(const Vector& b, Vector& grad) const {
    const Vector Gb = G * b;
    grad = 2.0 * (Gb - c);
    return std::max(b.dot(Gb) - 2.0 * c.dot(b) + yy, 0.0);
  }

  double value(const Vector& b) const { return std::max(b.dot(G * b) - 2.0 * c.dot(b) + yy, 0.0); }

  /// Power iteration, inflated slightly; the driver backtracks if this
  /// still underestimates the curvature.
  static double largest_eigenvalue(const Matrix& G) {
    const Index p = G.rows();
    Vector x(p);
    for (Index i = 0; i < p; ++i) x(i) = 1.0 + 0.01 * static_cast<double>(i % 7);
    x.normalize();
    double lam = 0.0;
    for (int it = 0; it < 500; ++it) {
      Vector y = G * x;
      const double nrm = y.norm();
      if (nrm == 0.0) return 0.0;
      const double next = x.dot(y);
      x = y / nrm;
      if (std::abs(next - lam) <= 1e-10 * std::abs(next)) {
        lam = next;
        break;
      }
      lam = next;
    }
    return 1.01 * lam;
  }
};

/// Accelerated proximal gradient with function-value restart. A candidate
/// that would raise F is replaced by a plain step from the current point,
/// so the accepted objective sequence never increases.
template <class Prox, class Penalty>
FitResult proximal_gradient(const QuadraticLoss& loss, Prox&& prox, Penalty&& penalty, const FitConfig& cfg,
                            const Vector& init) {
  validate(cfg);
  double L = cfg.step_size ? 1.0 / *cfg.step_size : std::max(loss.lipschitz, 1e-12);
  const bool adaptive = !cfg.step_size;

  FitResult r;
  Vector x = init;
  Vector y = x, grad, z;
  double fx = loss.value(x) + penalty(x);
  const double scale = std::max(fx, loss.yy);
  double t = 1.0;
  int small_steps = 0;
  if (cfg.record_trace) r.trace.push_back(fx);

  auto step_from = [&](const Vector& base) {
    loss.value_and_grad(base, grad);
    return prox(Vector(base - grad / L), 1.0 / L);
  };

  for (Index k = 1; k <= cfg.max_iters; ++k) {
    r.iterations = k;
    z = step_from(y);
    double fz = loss.value(z) + penalty(z);
    if (fz > fx) {
      t = 1.0;
      z = step_from(x);
      fz = loss.value(z) + penalty(z);
      int guard = 0;
      while (fz > fx && adaptive && fz - fx > 1e-14 * std::max(1.0, std::abs(fx)) && guard++ < 60) {
        L *= 2.0;
        z = step_from(x);
        fz = loss.value(z) + penalty(z);
      }
      if (fz > fx) {
        // No descent left at this precision.
        r.converged = true;
        break;
      }
      y = z;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = z + ((t - 1.0) / t_next) * (z - x);
      t = t_next;
    }
    const double change = fx - fz;
    const double step = (z - x).norm();
    x.swap(z);
    fx = fz;
    if (cfg.record_trace) r.trace.push_back(fx);
    if (change <= cfg.tol * fx + 1e-15 * scale || step <= 1e-15 * std::max(1.0, x.norm())) {
      if (++small_steps >= 3) {
        r.converged = true;
        break;
      }
    } else {
      small_steps = 0;
    }
  }
  r.beta = x;
  r.objective = fx;
  loss.value_and_grad(x, grad);
  r.stationarity = L * (x - prox(Vector(x - grad / L), 1.0 / L)).norm();
  return r;
}

}  // namespace detail

// --- sorted-l1 proximal map ----------------------------------------------------

/// argmin_x 0.5 |x - v|^2 + h sum_i lambda_i |x|_(i).
inline Vector prox_sorted_l1(const Vector& v, const Vector& lambdas, double h) {
  detail::require_dims(v.size() == lambdas.size(), "prox_sorted_l1: weight vector length differs from input");
  detail::require(h > 0.0, "prox_sorted_l1: h must be > 0");
  detail::check_lambdas(lambdas);
  const auto idx = detail::order_by_magnitude(v);
  const Index p = v.size();
  Vector w(p);
  for (Index k = 0; k < p; ++k) w(k) = -(std::abs(v(idx[static_cast<std::size_t>(k)])) - h * lambdas(k));
  // Nonincreasing fit of -w is a nondecreasing fit of w.
  detail::pava_inplace(w.data(), p);
  Vector x(p);
  for (Index k = 0; k < p; ++k) {
    const Index i = idx[static_cast<std::size_t>(k)];
    x(i) = detail::sign(v(i)) * std::max(-w(k), 0.0);
  }
  return x;
}

inline Vector prox_sorted_l1(const Vector& v, const SlopeLambdas& lambdas, double h) {
  return prox_sorted_l1(v, lambdas.values, h);
}

// --- fits ------------------------------------------------------------------------

/// min over K of (1/n)|y - X b|^2 by projected gradient from zero.
inline FitResult fit_constrained_ls(const Dataset& d, const ConstraintModel& model, const FitConfig& cfg = {}) {
  validate(model);
  detail::require_dims(d.cols() == model.p, "fit_constrained_ls: model dimension differs from design");
  if (std::holds_alternative<SlopeBall>(model.set))
    throw ConfigError("fit_constrained_ls: the SLOPE ball is not a fitting constraint");
  const detail::QuadraticLoss loss(d);
  auto proj = [&](const Vector& u, double) { return project_onto_set(model, u); };
  auto zero = [](const Vector&) { return 0.0; };
  return detail::proximal_gradient(loss, proj, zero, cfg, Vector::Zero(d.cols()));
}

/// min (1/n)|y - X b|^2 subject to |b|_1 <= Lambda.
inline FitResult fit_constrained_lasso(const Dataset& d, double Lambda, const FitConfig& cfg = {}) {
  detail::require(Lambda >= 0.0, "fit_constrained_lasso: Lambda must be >= 0");
  return fit_constrained_ls(d, ConstraintModel{L1Ball{Lambda}, d.cols()}, cfg);
}

namespace detail {

inline FitResult fit_slope_on(const QuadraticLoss& loss, const Vector& weights, const FitConfig& cfg,
                              const Vector& init) {
  auto prox = [&](const Vector& u, double h) { return prox_sorted_l1(u, weights, h); };
  auto pen = [&](const Vector& b) { return sorted_l1_norm(b, weights); };
  return proximal_gradient(loss, prox, pen, cfg, init);
}

}  // namespace detail

/// (1/n)|y - X b|^2 + sum_i lambda_i |b|_(i) by proximal gradient from zero.
inline FitResult fit_slope(const Dataset& d, const SlopeLambdas& lambdas, const FitConfig& cfg = {}) {
  detail::require_dims(lambdas.values.size() == d.cols(), "fit_slope: need one weight per column");
  detail::check_lambdas(lambdas.values);
  const detail::QuadraticLoss loss(d);
  return detail::fit_slope_on(loss, lambdas.values, cfg, Vector::Zero(d.cols()));
}

/// Square-root SLOPE by alternation: SLOPE with weights sigma * lambda
/// (warm started), then sigma = |y - X b| / sqrt(n).
inline SqrtSlopeResult fit_sqrt_slope(const Dataset& d, const SlopeLambdas& lambdas, const FitConfig& cfg = {}) {
  detail::require_dims(lambdas.values.size() == d.cols(), "fit_sqrt_slope: need one weight per column");
  detail::check_lambdas(lambdas.values);
  validate(cfg);
  const detail::QuadraticLoss loss(d);
  const double root_n = std::sqrt(static_cast<double>(d.rows()));
  auto rms = [&](const Vector& b) { return (d.y - d.X * b).norm() / root_n; };

  SqrtSlopeResult out;
  Vector beta = Vector::Zero(d.cols());
  double sigma = rms(beta);
  for (Index k = 1; k <= cfg.max_outer; ++k) {
    if (sigma < cfg.sigma_floor) throw DegenerateFitError("fit_sqrt_slope: residual scale collapsed to zero");
    out.outer_iterations = k;
    FitResult inner = detail::fit_slope_on(loss, sigma * lambdas.values, cfg, beta);
    const double sigma_next = rms(inner.beta);
    const double db = (inner.beta - beta).norm();
    const double ds = std::abs(sigma_next - sigma);
    beta = inner.beta;
    sigma = sigma_next;
    out.fit = std::move(inner);
    if (db <= cfg.outer_tol * std::max(1.0, beta.norm()) && ds <= cfg.outer_tol * std::max(1.0, sigma)) {
      out.converged = true;
      break;
    }
  }
  if (sigma < cfg.sigma_floor) throw DegenerateFitError("fit_sqrt_slope: residual scale collapsed to zero");
  out.sigma = sigma;
  return out;
}

}  // namespace debias
