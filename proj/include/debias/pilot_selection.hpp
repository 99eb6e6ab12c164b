#pragma once

// Step one of the debiasing procedure: from a pilot fit beta_hat build a
// vector v with a simple tangent cone, the set K it belongs to and an upper
// bound on the Gaussian width of T_K(v) ∩ S^{p-1}.

#include "debias/cone_geometry.hpp"
#include "debias/estimators.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace debias {

struct PilotSelection {
  Vector v;
  ConstraintModel model;
  TangentConeAt cone_at_v;
  /// Width bound floored at a_n.
  double width = 0.0;
  /// Width bound before flooring; this is the value in the selection criterion.
  double raw_width = 0.0;
  /// |beta_hat - v| + raw_width / sqrt(n).
  double objective = 0.0;
  /// Selected number of pieces l, zeroed coordinates s, or support size.
  Index selected = 0;
};

namespace detail {

inline double root_n(Index n) {
  require(n >= 1, "pilot selection: n must be >= 1");
  return std::sqrt(static_cast<double>(n));
}

inline PilotSelection finish_selection(const Vector& beta_hat, Vector v, ConstraintModel model, Index n,
                                       Index selected) {
  PilotSelection out;
  out.cone_at_v = tangent_cone_at(model, v);
  out.raw_width = raw_width_bound(model, out.cone_at_v);
  out.width = std::max(out.raw_width, width_floor(n));
  out.objective = (beta_hat - v).norm() + out.raw_width / root_n(n);
  out.v = std::move(v);
  out.model = model;
  out.selected = selected;
  return out;
}

inline Vector monotone_input(const Vector& beta_hat, bool positive) {
  require_dims(beta_hat.size() >= 1, "pilot selection: empty beta_hat");
  constexpr double slack = 1e-8;
  if (!is_nondecreasing(beta_hat, slack))
    throw ConfigError("pilot selection: beta_hat is not nondecreasing");
  if (positive && beta_hat.minCoeff() < -slack) throw ConfigError("pilot selection: beta_hat has negative entries");
  if (positive) return is_nondecreasing(beta_hat) && beta_hat.minCoeff() >= 0.0 ? beta_hat
                                                                                  : project_positive_monotone(beta_hat);
  return is_nondecreasing(beta_hat) ? beta_hat : project_monotone(beta_hat);
}

inline PilotSelection select_v_piecewise(const Vector& beta_hat, Index n, bool positive) {
  const Vector u = monotone_input(beta_hat, positive);
  const Index p = u.size();
  const double rn = root_n(n);
  MonotoneSegmenter seg(u);
  Index best_l = 1;
  double best = std::numeric_limits<double>::infinity();
  for (Index l = 1; l <= seg.max_pieces(); ++l) {
    const double crit = std::sqrt(seg.cost(l)) + sparse_width(l, p) / rn;
    if (crit < best) {
      best = crit;
      best_l = l;
    }
  }
  ConstraintModel model{MonotoneCone{}, p};
  if (positive) model.set = PositiveMonotoneCone{};
  return finish_selection(beta_hat, seg.project(best_l), model, n, best_l);
}

}  // namespace detail

/// argmin over l of |beta_hat - Pi_{M_l}(beta_hat)| + sqrt(l log(ep/l) / n).
inline PilotSelection select_v_monotone(const Vector& beta_hat, Index n) {
  return detail::select_v_piecewise(beta_hat, n, false);
}

inline PilotSelection select_v_positive_monotone(const Vector& beta_hat, Index n) {
  return detail::select_v_piecewise(beta_hat, n, true);
}

/// v_s zeroes the s smallest entries; argmin over s of |beta_hat - v_s| + sqrt((p - s/2) / n).
inline PilotSelection select_v_nonneg(const Vector& beta_hat, Index n) {
  detail::require_dims(beta_hat.size() >= 1, "select_v_nonneg: empty beta_hat");
  if (beta_hat.minCoeff() < -1e-8) throw ConfigError("select_v_nonneg: beta_hat has negative entries");
  const Vector b = beta_hat.cwiseMax(0.0);
  const Index p = b.size();
  const double rn = detail::root_n(n);
  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index c) { return b(a) < b(c); });

  Index best_s = 0;
  double best = std::numeric_limits<double>::infinity();
  double dist2 = 0.0;
  for (Index s = 0; s <= p; ++s) {
    if (s > 0) dist2 += b(order[static_cast<std::size_t>(s - 1)]) * b(order[static_cast<std::size_t>(s - 1)]);
    const double crit = std::sqrt(dist2) + std::sqrt((static_cast<double>(p) - 0.5 * static_cast<double>(s))) / rn;
    if (crit < best) {
      best = crit;
      best_s = s;
    }
  }
  Vector v = b;
  for (Index k = 0; k < best_s; ++k) v(order[static_cast<std::size_t>(k)]) = 0.0;
  return detail::finish_selection(beta_hat, std::move(v), ConstraintModel{NonNegOrthant{}, p}, n, best_s);
}

/// The s-sparse point of the l1 sphere of radius Lambda closest to beta_hat:
/// keep the s largest entries and spread the missing mass evenly over them.
inline Vector l1_sparse_candidate(const Vector& beta_hat, double Lambda, Index s) {
  const auto order = detail::order_by_magnitude(beta_hat);
  detail::require(s >= 1 && s <= beta_hat.size(), "l1_sparse_candidate: s out of range");
  double kept = 0.0;
  for (Index k = 0; k < s; ++k) kept += std::abs(beta_hat(order[static_cast<std::size_t>(k)]));
  const double add = (Lambda - kept) / static_cast<double>(s);
  Vector v = Vector::Zero(beta_hat.size());
  for (Index k = 0; k < s; ++k) {
    const Index i = order[static_cast<std::size_t>(k)];
    v(i) = beta_hat(i) + detail::sign(beta_hat(i)) * add;
  }
  return v;
}

/// argmin over s in [1, |beta_hat|_0] of |beta_hat - v_s| + sqrt(s log(ep/s) / n), |v_s|_1 = Lambda.
inline PilotSelection select_v_l1(const Vector& beta_hat, double Lambda, Index n) {
  detail::require_dims(beta_hat.size() >= 1, "select_v_l1: empty beta_hat");
  const double norm1 = beta_hat.lpNorm<1>();
  if (Lambda < norm1 * (1.0 - 1e-10))
    throw ConfigError("select_v_l1: Lambda = " + std::to_string(Lambda) + " is below |beta_hat|_1 = " +
                      std::to_string(norm1));
  const Index p = beta_hat.size();
  const Index nnz = (beta_hat.array() != 0.0).count();
  if (nnz == 0) throw ConfigError("select_v_l1: beta_hat is the zero vector");
  const double rn = detail::root_n(n);
  const auto order = detail::order_by_magnitude(beta_hat);
  const double total2 = beta_hat.squaredNorm();

  Index best_s = 1;
  double best = std::numeric_limits<double>::infinity();
  double kept = 0.0, kept2 = 0.0;
  for (Index s = 1; s <= nnz; ++s) {
    const double b = std::abs(beta_hat(order[static_cast<std::size_t>(s - 1)]));
    kept += b;
    kept2 += b * b;
    const double add = (Lambda - kept) / static_cast<double>(s);
    const double dist2 = static_cast<double>(s) * add * add + std::max(total2 - kept2, 0.0);
    const double crit = std::sqrt(dist2) + sparse_width(s, p) / rn;
    if (crit < best) {
      best = crit;
      best_s = s;
    }
  }
  return detail::finish_selection(beta_hat, l1_sparse_candidate(beta_hat, Lambda, best_s),
                                  ConstraintModel{L1Ball{Lambda}, p}, n, best_s);
}

/// Largest-l1 point within C sqrt(s_u log(2ep/s_u) / n) of beta_hat with at
/// most s_u nonzeros; K is the l1 ball through it. Zero entries of beta_hat
/// that are kept move in the positive direction.
inline PilotSelection select_v_slope(const Vector& beta_hat, Index s_u, double C, Index n) {
  const Index p = beta_hat.size();
  detail::require_dims(p >= 1, "select_v_slope: empty beta_hat");
  detail::require(s_u >= 1 && s_u <= p, "select_v_slope: need 1 <= s_u <= p");
  detail::require(C > 0.0, "select_v_slope: C must be > 0");
  const auto order = detail::order_by_magnitude(beta_hat);
  double tail2 = 0.0;
  for (Index k = s_u; k < p; ++k) tail2 += beta_hat(order[static_cast<std::size_t>(k)]) * beta_hat(order[static_cast<std::size_t>(k)]);
  const double su = static_cast<double>(s_u);
  const double log_term = std::log(2.0 * std::exp(1.0) * static_cast<double>(p) / su);
  const double radius2 = C * C * su * log_term / static_cast<double>(n);
  if (radius2 < tail2) {
    const double c_min = std::sqrt(static_cast<double>(n) * tail2 / (su * log_term));
    throw ConfigError("select_v_slope: C too small; need C >= sqrt(n * tail^2 / (s_u log(2ep/s_u))) = " +
                      std::to_string(c_min));
  }
  const double c = std::sqrt((radius2 - tail2) / su);
  Vector v = Vector::Zero(p);
  for (Index k = 0; k < s_u; ++k) {
    const Index i = order[static_cast<std::size_t>(k)];
    v(i) = beta_hat(i) + (beta_hat(i) < 0.0 ? -c : c);
  }
  if (v.lpNorm<1>() == 0.0) throw ConfigError("select_v_slope: pilot is the zero vector");
  return detail::finish_selection(beta_hat, std::move(v), ConstraintModel{SlopeBall{s_u, C}, p}, n, s_u);
}

/// (sqrt(n) / (s_u log(ep/s_u)))^gamma. Sets *warning when the base is below
/// one, i.e. the sparsity bound is too large for n.
inline double choose_C_slope(Index n, Index p, Index s_u, double gamma, std::string* warning = nullptr) {
  detail::require(n >= 1 && p >= 1 && s_u >= 1 && s_u <= p, "choose_C_slope: need n >= 1 and 1 <= s_u <= p");
  detail::require(gamma > 0.0 && gamma < 1.0, "choose_C_slope: gamma must lie in (0,1)");
  const double su = static_cast<double>(s_u);
  const double base = std::sqrt(static_cast<double>(n)) / (su * std::log(std::exp(1.0) * static_cast<double>(p) / su));
  if (base < 1.0 && warning)
    *warning = "choose_C_slope: s_u log(ep/s_u) exceeds sqrt(n); C falls below 1";
  return std::pow(base, gamma);
}

}  // namespace debias
