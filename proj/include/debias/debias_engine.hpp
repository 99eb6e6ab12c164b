#pragma once

// Step two: the projection direction eta, found by projected-subgradient
// descent on
//   min |Sigma_hat^{1/2} eta|  s.t.  sup_{u in T ∩ S^{p-1}} |(Sigma_hat eta - target)'u| <= rho w / sqrt(n),
// and the debiased estimate built from it.

#include "debias/cone_geometry.hpp"
#include "debias/model_core.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <variant>
#include <vector>

namespace debias {

struct InverseSqrtStep {
  double h0 = 1.0;
};
struct ConstantStep {
  double h = 1e-2;
};

struct EtaConfig {
  double rho = 1.0;
  double rho_growth = 2.0;
  double rho_max = 32768.0;
  /// Sub-Gaussian mode: |X eta|_inf <= rho_prime sqrt(log n).
  double rho_prime = 2.0;
  std::variant<InverseSqrtStep, ConstantStep> step = InverseSqrtStep{};
  Index max_iters = 20000;
  /// Infeasible iterations tolerated before rho (or rho_prime) grows.
  Index feasibility_patience = 2000;
  /// Stop once the best feasible objective improved by less than
  /// stall_tol (relative) over the last stall_window iterations. 0 disables.
  Index stall_window = 0;
  double stall_tol = 1e-4;
  std::optional<Vector> eta0;
  bool record_trace = false;
};

inline void validate(const EtaConfig& cfg) {
  detail::require(cfg.rho > 0.0, "eta: rho must be > 0");
  detail::require(cfg.rho_growth > 1.0, "eta: rho_growth must be > 1");
  detail::require(cfg.rho_max >= cfg.rho, "eta: rho_max must be >= rho");
  detail::require(cfg.rho_prime > 0.0, "eta: rho_prime must be > 0");
  detail::require(cfg.max_iters >= 1, "eta: max_iters must be >= 1");
  detail::require(cfg.feasibility_patience >= 1, "eta: feasibility_patience must be >= 1");
  detail::require(cfg.stall_window >= 0 && cfg.stall_tol >= 0.0, "eta: invalid stall settings");
  if (const auto* s = std::get_if<InverseSqrtStep>(&cfg.step)) detail::require(s->h0 > 0.0, "eta: h0 must be > 0");
  if (const auto* s = std::get_if<ConstantStep>(&cfg.step)) detail::require(s->h > 0.0, "eta: h must be > 0");
}

struct EtaTracePoint {
  Index iter = 0;
  double objective = 0.0;
  double psi = 0.0;
  double rho = 0.0;
};

struct EtaResult {
  Vector eta;
  /// |Sigma_hat^{1/2} eta|.
  double objective = 0.0;
  /// rho_final * width / sqrt(n).
  double lambda = 0.0;
  bool feasible = false;
  Index iterations = 0;
  double rho_final = 0.0;
  double rho_prime_final = 0.0;
  std::vector<EtaTracePoint> trace;
};

inline void write_trace_csv(std::ostream& os, const EtaResult& r) {
  os << "iter,objective,psi,rho\n";
  for (const auto& t : r.trace) os << t.iter << ',' << t.objective << ',' << t.psi << ',' << t.rho << '\n';
}

/// Value of the constraint function and the data behind its subgradient.
struct PsiEval {
  double value = 0.0;
  /// Sigma_hat eta - target.
  Vector w;
  double norm_tangent = 0.0;
  double norm_negative = 0.0;
  /// Normalized projections onto T and -T; a branch whose projection
  /// vanishes is left empty.
  Vector phi0, phi1;
  /// 0 or 1: the branch attaining the max; -1 if both projections vanish.
  int branch = -1;
};

inline constexpr double kProjectionEpsilon = 1e-14;

namespace detail {

inline PsiEval psi_from_w(Vector w, const TangentConeAt& cone, double lambda) {
  PsiEval out;
  const Vector pt = project_tangent_cone(w, cone);
  const Vector pn = project_negative_cone(w, cone);
  out.norm_tangent = pt.norm();
  out.norm_negative = pn.norm();
  const bool use0 = out.norm_tangent >= kProjectionEpsilon;
  const bool use1 = out.norm_negative >= kProjectionEpsilon;
  if (use0) out.phi0 = pt / out.norm_tangent;
  if (use1) out.phi1 = pn / out.norm_negative;
  if (!use0 && !use1) {
    out.value = -lambda;
    out.branch = -1;
  } else {
    const double a = use0 ? w.dot(out.phi0) : -std::numeric_limits<double>::infinity();
    const double b = use1 ? w.dot(out.phi1) : -std::numeric_limits<double>::infinity();
    // Take phi1 exactly when w'(phi0 - phi1) < 0.
    out.branch = (a - b < 0.0) ? 1 : 0;
    out.value = std::max(out.norm_tangent, out.norm_negative) - lambda;
  }
  out.w = std::move(w);
  return out;
}

}  // namespace detail

/// psi(eta) = max(|Pi_T(w)|, |Pi_{-T}(w)|) - lambda with w = Sigma_hat eta - target.
inline PsiEval psi(const Vector& eta, const Matrix& gram, const Vector& target, const TangentConeAt& cone,
                   double lambda) {
  detail::require_dims(gram.rows() == gram.cols() && gram.rows() == eta.size() && target.size() == eta.size(),
                       "psi: dimension mismatch");
  return detail::psi_from_w(gram * eta - target, cone, lambda);
}

/// The subgradient of psi selected by the branch rule (zero if no branch).
inline Vector psi_subgradient(const PsiEval& e, const Matrix& gram) {
  if (e.branch == 0) return gram * e.phi0;
  if (e.branch == 1) return gram * e.phi1;
  return Vector::Zero(gram.rows());
}

namespace detail {

inline EtaResult solve_eta_impl(const Matrix& gram, const Vector& target, const TangentConeAt& cone, double width,
                                Index n, const Matrix* X_second, const EtaConfig& cfg) {
  validate(cfg);
  validate(cone);
  const Index p = gram.rows();
  require_dims(gram.cols() == p && target.size() == p, "solve_eta: dimension mismatch");
  require_dims(dimension(cone) == p, "solve_eta: cone dimension differs from Gram matrix");
  require(width > 0.0, "solve_eta: width must be > 0");
  require(n >= 1, "solve_eta: n must be >= 1");
  if (X_second) require_dims(X_second->cols() == p && X_second->rows() == n, "solve_eta: X_second must be n x p");

  const double root_n = std::sqrt(static_cast<double>(n));
  const double log_root = std::sqrt(std::log(static_cast<double>(std::max<Index>(n, 2))));
  double rho = cfg.rho;
  double rho_prime = cfg.rho_prime;
  double lambda = rho * width / root_n;

  EtaResult out;
  Vector eta = cfg.eta0 ? *cfg.eta0 : Vector::Zero(p);
  require_dims(eta.size() == p, "solve_eta: eta0 has the wrong length");

  std::optional<Vector> best;
  double best_obj = std::numeric_limits<double>::infinity();
  Index since_feasible = 0;  // consecutive iterations without a fully feasible point
  Index since_psi_ok = 0;    // of those, iterations that met psi but not psi'
  Index step_k = 0;
  double window_start_obj = std::numeric_limits<double>::infinity();
  Index window_start_iter = 0;

  auto step_size = [&](Index k) {
    if (const auto* s = std::get_if<InverseSqrtStep>(&cfg.step)) return s->h0 / std::sqrt(static_cast<double>(k));
    return std::get<ConstantStep>(cfg.step).h;
  };

  for (Index it = 1; it <= cfg.max_iters; ++it) {
    out.iterations = it;
    Vector g_eta = gram * eta;
    const double quad = std::max(eta.dot(g_eta), 0.0);
    const double obj = std::sqrt(quad);
    PsiEval e = psi_from_w(g_eta - target, cone, lambda);

    double psi_prime = -1.0;
    Index i_star = 0;
    if (X_second) {
      const Vector xe = (*X_second) * eta;
      Index idx = 0;
      const double m = xe.cwiseAbs().maxCoeff(&idx);
      i_star = idx;
      psi_prime = m - rho_prime * log_root;
    }
    if (cfg.record_trace) out.trace.push_back({it, obj, e.value, rho});

    const bool ok_psi = e.value <= 0.0;
    const bool ok_prime = psi_prime <= 0.0;
    Vector g;
    if (ok_psi && ok_prime) {
      since_feasible = 0;
      since_psi_ok = 0;
      if (obj <= best_obj) {
        best_obj = obj;
        best = eta;
      }
      if (eta.isZero(0.0) || quad == 0.0) break;  // zero objective: nothing below it
      g = g_eta / obj;
    } else {
      ++since_feasible;
      if (!ok_psi) {
        g = psi_subgradient(e, gram);
      } else {
        ++since_psi_ok;
        const auto row = X_second->row(i_star);
        g = (row.dot(eta) >= 0.0 ? 1.0 : -1.0) * row.transpose();
      }
    }

    if (!best && since_feasible >= cfg.feasibility_patience) {
      // Enlarge the constraint that keeps failing.
      if (X_second && since_psi_ok * 2 > since_feasible) {
        rho_prime *= cfg.rho_growth;
      } else if (rho * cfg.rho_growth <= cfg.rho_max) {
        rho *= cfg.rho_growth;
        lambda = rho * width / root_n;
      }
      since_feasible = 0;
      since_psi_ok = 0;
      step_k = 0;
    }

    if (cfg.stall_window > 0 && best) {
      if (it - window_start_iter >= cfg.stall_window) {
        if (window_start_obj - best_obj <= cfg.stall_tol * window_start_obj) break;
        window_start_obj = best_obj;
        window_start_iter = it;
      } else if (window_start_obj == std::numeric_limits<double>::infinity()) {
        window_start_obj = best_obj;
        window_start_iter = it;
      }
    }

    eta -= step_size(++step_k) * g;
  }

  out.rho_final = rho;
  out.rho_prime_final = rho_prime;
  out.lambda = lambda;
  if (!best)
    throw InfeasibleError("solve_eta: no feasible point within " + std::to_string(cfg.max_iters) +
                              " iterations (final rho " + std::to_string(rho) + ")",
                          rho);
  out.eta = *best;
  out.objective = best_obj;
  out.feasible = true;
  return out;
}

}  // namespace detail

/// Projected-subgradient solve for eta under Gaussian noise.
inline EtaResult solve_eta(const Matrix& gram, const Vector& target, const TangentConeAt& cone, double width, Index n,
                           const EtaConfig& cfg = {}) {
  return detail::solve_eta_impl(gram, target, cone, width, n, nullptr, cfg);
}

/// As solve_eta with the extra constraint |X_second eta|_inf <= rho' sqrt(log n).
/// A psi violation is handled before a psi' violation.
inline EtaResult solve_eta_subgaussian(const Matrix& gram, const Vector& target, const TangentConeAt& cone,
                                       double width, Index n, const Matrix& X_second, const EtaConfig& cfg = {}) {
  return detail::solve_eta_impl(gram, target, cone, width, n, &X_second, cfg);
}

/// Subgradient of psi'(eta) = |X eta|_inf - c: sign(X_i' eta) X_i at the
/// row of largest magnitude (first such row on ties).
inline Vector psi_prime_subgradient(const Matrix& X, const Vector& eta) {
  detail::require_dims(X.cols() == eta.size(), "psi_prime_subgradient: dimension mismatch");
  const Vector xe = X * eta;
  Index i = 0;
  xe.cwiseAbs().maxCoeff(&i);
  return (xe(i) >= 0.0 ? 1.0 : -1.0) * X.row(i).transpose();
}

// --- debiasing formulas ------------------------------------------------------------

/// target'v + (1/n) eta' X'(y - X v) on the second half.
inline double debias_target(const Vector& v, const Vector& eta, const Dataset& second, const Vector& target) {
  second.check();
  detail::require_dims(v.size() == second.cols() && eta.size() == v.size() && target.size() == v.size(),
                       "debias_target: dimension mismatch");
  const Vector resid = second.y - second.X * v;
  return target.dot(v) + (second.X * eta).dot(resid) / static_cast<double>(second.rows());
}

/// beta_hat + (1/n) Sigma^{-1} X'(y - X beta_hat) with the population covariance.
inline Vector debias_known_sigma(const Vector& beta_hat, const Matrix& sigma_inv, const Dataset& second) {
  second.check();
  detail::require_dims(beta_hat.size() == second.cols() && sigma_inv.rows() == beta_hat.size() &&
                           sigma_inv.cols() == beta_hat.size(),
                       "debias_known_sigma: dimension mismatch");
  const Vector resid = second.y - second.X * beta_hat;
  return beta_hat + sigma_inv * (second.X.transpose() * resid) / static_cast<double>(second.rows());
}

struct DeltaDiagnostic {
  /// sqrt(n) (Sigma_hat eta - target)'(beta_star - v).
  double delta = 0.0;
  /// sqrt(n) lambda |beta_star - v|.
  double bound = 0.0;
};

inline DeltaDiagnostic delta_diagnostic(const Vector& eta, const Matrix& gram, const Vector& target, const Vector& v,
                                        const Vector& beta_star, Index n, double lambda) {
  detail::require_dims(eta.size() == gram.rows() && target.size() == eta.size() && v.size() == eta.size() &&
                           beta_star.size() == eta.size(),
                       "delta_diagnostic: dimension mismatch");
  const double rn = std::sqrt(static_cast<double>(n));
  const Vector diff = beta_star - v;
  return {rn * (gram * eta - target).dot(diff), rn * lambda * diff.norm()};
}

/// Whether x lies in the tangent cone, up to a relative tolerance.
inline bool in_tangent_cone(const Vector& x, const TangentConeAt& cone, double tol = 1e-9) {
  return (x - project_tangent_cone(x, cone)).norm() <= tol * std::max(1.0, x.norm());
}

struct DebiasOutput {
  Vector target;
  double value = 0.0;
  EtaResult eta;
  /// sqrt(eta' Sigma_hat eta).
  double sd_hat = 0.0;
  std::optional<DeltaDiagnostic> delta;
};

inline Vector unit_target(Index p, Index j) {
  detail::require(j >= 0 && j < p, "target index out of range");
  Vector e = Vector::Zero(p);
  e(j) = 1.0;
  return e;
}

}  // namespace debias
