#pragma once

// Euclidean projections onto the constraint sets used by the estimators,
// onto their tangent and normal cones at a point, and upper bounds on the
// Gaussian width of those tangent cones intersected with the unit sphere.
//
// All functions are pure. Projections return raw vectors and never
// normalize; a zero result is returned as the zero vector.

#include "debias/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

namespace debias {

// --- constraint sets -------------------------------------------------------

/// Nondecreasing vectors.
struct MonotoneCone {};
/// Nondecreasing vectors with nonnegative entries.
struct PositiveMonotoneCone {};
struct NonNegOrthant {};
/// {b : |b|_1 <= radius}.
struct L1Ball {
  double radius = 0.0;
};
/// The l1 ball built around a sparsity-bound pilot: s_u retained entries
/// and the radius constant C. Its radius is fixed once v is known.
struct SlopeBall {
  Index s_u = 1;
  double C = 1.0;
};

struct ConstraintModel {
  std::variant<MonotoneCone, PositiveMonotoneCone, NonNegOrthant, L1Ball, SlopeBall> set;
  Index p = 1;
};

inline void validate(const ConstraintModel& m) {
  detail::require(m.p >= 1, "constraint model: p must be >= 1");
  if (const auto* b = std::get_if<L1Ball>(&m.set)) {
    detail::require(b->radius >= 0.0, "constraint model: l1 radius must be >= 0");
  } else if (const auto* s = std::get_if<SlopeBall>(&m.set)) {
    detail::require(s->s_u >= 1 && s->s_u <= m.p, "constraint model: need 1 <= s_u <= p");
    detail::require(s->C > 0.0, "constraint model: C must be > 0");
  }
}

// --- tangent cone descriptors ----------------------------------------------

/// T = M^{p_1} x ... x M^{p_l}; `pieces` are the constant-piece lengths of v.
struct MonotoneTangent {
  std::vector<Index> pieces;
};
/// As MonotoneTangent, but the first factor is M^{p_1,+} when v's first
/// piece is exactly zero.
struct PositiveMonotoneTangent {
  std::vector<Index> pieces;
  bool first_piece_is_zero = false;
};
/// Orthant tangent: coordinates in `zeros` (where v_i = 0) must stay >= 0.
struct NonNegTangent {
  Index p = 0;
  std::vector<Index> zeros;
};
/// Tangent cone of the l1 ball at a boundary point v with support `support`
/// and signs `signs` (+1 / -1, aligned with `support`).
struct L1BoundaryTangent {
  Index p = 0;
  std::vector<Index> support;
  std::vector<int> signs;
};
/// v is interior; the tangent cone is all of R^p.
struct FullSpaceTangent {
  Index p = 0;
};

using TangentConeAt = std::variant<MonotoneTangent, PositiveMonotoneTangent, NonNegTangent,
                                   L1BoundaryTangent, FullSpaceTangent>;

inline Index dimension(const TangentConeAt& cone) {
  return std::visit(
      [](const auto& c) -> Index {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, MonotoneTangent> || std::is_same_v<C, PositiveMonotoneTangent>) {
          return std::accumulate(c.pieces.begin(), c.pieces.end(), Index{0});
        } else {
          return c.p;
        }
      },
      cone);
}

inline void validate(const TangentConeAt& cone) {
  std::visit(
      [](const auto& c) {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, MonotoneTangent> || std::is_same_v<C, PositiveMonotoneTangent>) {
          detail::require(!c.pieces.empty(), "tangent cone: no pieces");
          for (Index len : c.pieces) detail::require(len >= 1, "tangent cone: piece length must be >= 1");
        } else if constexpr (std::is_same_v<C, NonNegTangent>) {
          detail::require(c.p >= 1, "tangent cone: p must be >= 1");
          for (std::size_t k = 0; k < c.zeros.size(); ++k) {
            detail::require(c.zeros[k] >= 0 && c.zeros[k] < c.p, "tangent cone: zero index out of range");
            detail::require(k == 0 || c.zeros[k] > c.zeros[k - 1], "tangent cone: zero set must be sorted, unique");
          }
        } else if constexpr (std::is_same_v<C, L1BoundaryTangent>) {
          detail::require(c.p >= 1, "tangent cone: p must be >= 1");
          detail::require(!c.support.empty(), "tangent cone: l1 boundary support is empty");
          detail::require(c.support.size() == c.signs.size(), "tangent cone: support/sign size mismatch");
          std::vector<char> seen(static_cast<std::size_t>(c.p), 0);
          for (std::size_t k = 0; k < c.support.size(); ++k) {
            const Index i = c.support[k];
            detail::require(i >= 0 && i < c.p, "tangent cone: support index out of range");
            detail::require(!seen[static_cast<std::size_t>(i)], "tangent cone: duplicate support index");
            seen[static_cast<std::size_t>(i)] = 1;
            detail::require(c.signs[k] == 1 || c.signs[k] == -1, "tangent cone: signs must be +1 or -1");
          }
        } else {
          detail::require(c.p >= 1, "tangent cone: p must be >= 1");
        }
      },
      cone);
}

// --- isotonic regression -------------------------------------------------------

namespace detail {

/// Pool-adjacent-violators on x[begin, end) in place. Pooled values are
/// written as one shared sum/count quotient, so equal pieces compare equal.
inline void pava_inplace(double* x, Index len) {
  if (len <= 1) return;
  std::vector<double> sum;
  std::vector<Index> count;
  sum.reserve(static_cast<std::size_t>(len));
  count.reserve(static_cast<std::size_t>(len));
  for (Index i = 0; i < len; ++i) {
    sum.push_back(x[i]);
    count.push_back(1);
    while (sum.size() > 1) {
      const std::size_t k = sum.size() - 1;
      const double cur = sum[k] / static_cast<double>(count[k]);
      const double prev = sum[k - 1] / static_cast<double>(count[k - 1]);
      if (prev < cur) break;
      sum[k - 1] += sum[k];
      count[k - 1] += count[k];
      sum.pop_back();
      count.pop_back();
    }
  }
  Index pos = 0;
  for (std::size_t k = 0; k < sum.size(); ++k) {
    const double mean = sum[k] / static_cast<double>(count[k]);
    for (Index c = 0; c < count[k]; ++c) x[pos++] = mean;
  }
}

}  // namespace detail

/// Projection onto the monotone (nondecreasing) cone.
inline Vector project_monotone(const Vector& u) {
  Vector x = u;
  detail::pava_inplace(x.data(), x.size());
  return x;
}

/// Projection onto {0 <= x_1 <= ... <= x_p}: isotonic fit, then negatives to zero.
inline Vector project_positive_monotone(const Vector& u) {
  Vector x = project_monotone(u);
  x = x.cwiseMax(0.0);
  return x;
}

/// Lengths of the maximal runs of exactly equal consecutive entries.
inline std::vector<Index> constant_pieces(const Vector& v) {
  std::vector<Index> pieces;
  Index start = 0;
  for (Index i = 1; i <= v.size(); ++i) {
    if (i == v.size() || v(i) != v(i - 1)) {
      pieces.push_back(i - start);
      start = i;
    }
  }
  return pieces;
}

inline bool is_nondecreasing(const Vector& v, double tol = 0.0) {
  for (Index i = 1; i < v.size(); ++i)
    if (v(i) < v(i - 1) - tol) return false;
  return true;
}

/// Best approximations of a nondecreasing vector by nondecreasing vectors
/// with at most l constant pieces, for every l in [1, p'] where p' is the
/// number of constant pieces of the input. Dynamic programming over segment
/// boundaries between the input's own pieces: O(p'^2) segment costs, then
/// O(l p'^2) per level, O(p'^3) in total.
class MonotoneSegmenter {
 public:
  explicit MonotoneSegmenter(const Vector& u) : u_(u) {
    detail::require(u.size() >= 1, "monotone segmentation: empty input");
    detail::require(is_nondecreasing(u), "monotone segmentation: input must be nondecreasing");
    const auto lens = constant_pieces(u);
    m_ = static_cast<Index>(lens.size());
    value_.resize(static_cast<std::size_t>(m_));
    weight_.resize(static_cast<std::size_t>(m_));
    start_.resize(static_cast<std::size_t>(m_) + 1);
    Index pos = 0;
    for (Index k = 0; k < m_; ++k) {
      start_[k] = pos;
      value_[k] = u(pos);
      weight_[k] = static_cast<double>(lens[k]);
      pos += lens[k];
    }
    start_[m_] = pos;
    build_costs();
    solve();
  }

  /// Number of constant pieces p' of the input.
  Index max_pieces() const { return m_; }

  /// Squared distance from the input to its projection with at most l pieces.
  double cost(Index l) const {
    check_level(l);
    return best_[idx(l, m_)];
  }

  Vector project(Index l) const {
    check_level(l);
    // Walk back-pointers from (l, m) to recover segment boundaries.
    std::vector<Index> ends;
    Index b = m_;
    for (Index k = l; k >= 1; --k) {
      ends.push_back(b);
      b = back_[idx(k, b)];
    }
    std::reverse(ends.begin(), ends.end());
    Vector out(u_.size());
    Index a = 0;
    for (Index e : ends) {
      double s = 0.0, w = 0.0;
      for (Index k = a; k < e; ++k) {
        s += weight_[k] * value_[k];
        w += weight_[k];
      }
      const double mean = s / w;
      out.segment(start_[a], start_[e] - start_[a]).setConstant(mean);
      a = e;
    }
    return out;
  }

 private:
  std::size_t idx(Index l, Index b) const { return static_cast<std::size_t>(l * (m_ + 1) + b); }

  void check_level(Index l) const {
    if (l < 1 || l > m_)
      throw ConfigError("monotone segmentation: l = " + std::to_string(l) + " outside [1, " + std::to_string(m_) +
                        "]");
  }

  void build_costs() {
    // seg_[a * (m+1) + b] = weighted within-segment sum of squares of pieces a..b-1.
    seg_.assign(static_cast<std::size_t>((m_ + 1) * (m_ + 1)), 0.0);
    for (Index a = 0; a < m_; ++a) {
      double w = 0.0, mean = 0.0, m2 = 0.0;
      for (Index b = a; b < m_; ++b) {
        // weighted Welford update
        const double wk = weight_[b];
        const double delta = value_[b] - mean;
        w += wk;
        mean += delta * wk / w;
        m2 += wk * delta * (value_[b] - mean);
        seg_[static_cast<std::size_t>(a * (m_ + 1) + b + 1)] = std::max(m2, 0.0);
      }
    }
  }

  void solve() {
    const double inf = std::numeric_limits<double>::infinity();
    best_.assign(static_cast<std::size_t>((m_ + 1) * (m_ + 1)), inf);
    back_.assign(static_cast<std::size_t>((m_ + 1) * (m_ + 1)), 0);
    best_[idx(0, 0)] = 0.0;
    for (Index l = 1; l <= m_; ++l) {
      for (Index b = l; b <= m_; ++b) {
        double bestv = inf;
        Index arg = l - 1;
        for (Index a = l - 1; a < b; ++a) {
          const double c = best_[idx(l - 1, a)] + seg_[static_cast<std::size_t>(a * (m_ + 1) + b)];
          if (c < bestv) {
            bestv = c;
            arg = a;
          }
        }
        best_[idx(l, b)] = bestv;
        back_[idx(l, b)] = arg;
      }
    }
  }

  Vector u_;
  Index m_ = 0;
  std::vector<double> value_, weight_;
  std::vector<Index> start_;
  std::vector<double> seg_, best_;
  std::vector<Index> back_;
};

/// Projection of a nondecreasing u onto monotone vectors with <= l pieces.
inline Vector project_monotone_pieces(const Vector& u, Index l) { return MonotoneSegmenter(u).project(l); }

// --- l1 ball -------------------------------------------------------------------

/// Projection onto {x : |x|_1 <= radius} by sorted soft thresholding.
inline Vector project_l1_ball(const Vector& u, double radius) {
  detail::require(radius >= 0.0, "project_l1_ball: radius must be >= 0");
  if (u.lpNorm<1>() <= radius) return u;
  if (radius == 0.0) return Vector::Zero(u.size());
  std::vector<double> mag(static_cast<std::size_t>(u.size()));
  for (Index i = 0; i < u.size(); ++i) mag[static_cast<std::size_t>(i)] = std::abs(u(i));
  std::sort(mag.begin(), mag.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < mag.size(); ++k) {
    cumsum += mag[k];
    const double t = (cumsum - radius) / static_cast<double>(k + 1);
    if (k + 1 == mag.size() || mag[k + 1] <= t) {
      theta = t;
      break;
    }
  }
  Vector x(u.size());
  for (Index i = 0; i < u.size(); ++i) x(i) = detail::sign(u(i)) * std::max(std::abs(u(i)) - theta, 0.0);
  return x;
}

// --- normal cone of the l1 ball ----------------------------------------------------

struct NormalConeSearch {
  enum class Method { Exact, GoldenSection };
  Method method = Method::Exact;
  /// Interval tolerance for golden-section search.
  double tol = 1e-12;
};

namespace detail {

/// f(t) = sum_S (z_i sign(v_i) - t)^2 + sum_{not S} (|z_i| - t)_+^2.
inline double normal_cone_objective(const Vector& z, const L1BoundaryTangent& c, const std::vector<char>& in_s,
                                    double t) {
  double f = 0.0;
  for (std::size_t k = 0; k < c.support.size(); ++k) {
    const double r = z(c.support[k]) * c.signs[k] - t;
    f += r * r;
  }
  for (Index i = 0; i < z.size(); ++i) {
    if (in_s[static_cast<std::size_t>(i)]) continue;
    const double h = std::max(std::abs(z(i)) - t, 0.0);
    f += h * h;
  }
  return f;
}

}  // namespace detail

/// Projection onto N_K(v), K an l1 ball with v on its boundary. N_K(v) is
/// {t sign(v_i) on S, |w_i| <= t off S, t >= 0}; the scalar t is found by a
/// one-dimensional search over [0, |z|_inf] and the projection is
/// t sign(v_i) on S and sign(z_i) min(t, |z_i|) off S.
inline Vector project_normal_l1ball(const Vector& z, const L1BoundaryTangent& cone, NormalConeSearch opt = {}) {
  validate(TangentConeAt{cone});
  detail::require_dims(z.size() == cone.p, "project_normal_l1ball: dimension mismatch");
  const Index p = z.size();
  std::vector<char> in_s(static_cast<std::size_t>(p), 0);
  double sum_s = 0.0;
  for (std::size_t k = 0; k < cone.support.size(); ++k) {
    in_s[static_cast<std::size_t>(cone.support[k])] = 1;
    sum_s += z(cone.support[k]) * cone.signs[k];
  }
  const double upper = z.size() ? z.cwiseAbs().maxCoeff() : 0.0;

  double t_hat = 0.0;
  if (opt.method == NormalConeSearch::Method::Exact) {
    // Off-support magnitudes in decreasing order; on each interval between
    // consecutive breakpoints the objective is a quadratic in t whose
    // active hinge terms are the k largest magnitudes.
    std::vector<double> b;
    b.reserve(static_cast<std::size_t>(p) - cone.support.size());
    for (Index i = 0; i < p; ++i)
      if (!in_s[static_cast<std::size_t>(i)]) b.push_back(std::abs(z(i)));
    std::sort(b.begin(), b.end(), std::greater<>());
    const double n_s = static_cast<double>(cone.support.size());
    double acc = sum_s;
    double t_star = acc / n_s;
    for (std::size_t k = 0;; ++k) {
      const double t_k = acc / (n_s + static_cast<double>(k));
      const double lo = k < b.size() ? b[k] : -std::numeric_limits<double>::infinity();
      if (t_k >= lo) {
        t_star = t_k;
        break;
      }
      acc += b[k];
    }
    t_hat = std::clamp(t_star, 0.0, upper);
  } else {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.0, c = upper;
    double x1 = c - phi * (c - a), x2 = a + phi * (c - a);
    double f1 = detail::normal_cone_objective(z, cone, in_s, x1);
    double f2 = detail::normal_cone_objective(z, cone, in_s, x2);
    while (c - a > opt.tol * std::max(1.0, upper)) {
      if (f1 <= f2) {
        c = x2;
        x2 = x1;
        f2 = f1;
        x1 = c - phi * (c - a);
        f1 = detail::normal_cone_objective(z, cone, in_s, x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (c - a);
        f2 = detail::normal_cone_objective(z, cone, in_s, x2);
      }
    }
    t_hat = 0.5 * (a + c);
  }

  Vector out(p);
  for (Index i = 0; i < p; ++i)
    if (!in_s[static_cast<std::size_t>(i)]) out(i) = detail::sign(z(i)) * std::min(t_hat, std::abs(z(i)));
  for (std::size_t k = 0; k < cone.support.size(); ++k) out(cone.support[k]) = t_hat * cone.signs[k];
  return out;
}

// --- tangent cone projections --------------------------------------------------------

/// Projection onto the tangent cone described by `cone`.
inline Vector project_tangent_cone(const Vector& x, const TangentConeAt& cone) {
  detail::require_dims(x.size() == dimension(cone),
                       "project_tangent_cone: vector has length " + std::to_string(x.size()) +
                           " but the cone lives in dimension " + std::to_string(dimension(cone)));
  return std::visit(
      [&](const auto& c) -> Vector {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, MonotoneTangent> || std::is_same_v<C, PositiveMonotoneTangent>) {
          Vector out = x;
          Index pos = 0;
          for (std::size_t k = 0; k < c.pieces.size(); ++k) {
            const Index len = c.pieces[k];
            detail::require(len >= 1, "tangent cone: piece length must be >= 1");
            detail::pava_inplace(out.data() + pos, len);
            if constexpr (std::is_same_v<C, PositiveMonotoneTangent>) {
              if (k == 0 && c.first_piece_is_zero) out.segment(0, len) = out.segment(0, len).cwiseMax(0.0);
            }
            pos += len;
          }
          return out;
        } else if constexpr (std::is_same_v<C, NonNegTangent>) {
          Vector out = x;
          for (Index i : c.zeros) {
            detail::require(i >= 0 && i < c.p, "tangent cone: zero index out of range");
            out(i) = std::max(out(i), 0.0);
          }
          return out;
        } else if constexpr (std::is_same_v<C, L1BoundaryTangent>) {
          return x - project_normal_l1ball(x, c);
        } else {
          return x;
        }
      },
      cone);
}

/// Projection onto -T: -Pi_T(-x).
inline Vector project_negative_cone(const Vector& x, const TangentConeAt& cone) {
  return -project_tangent_cone(-x, cone);
}

// --- constraint-set helpers -----------------------------------------------------

/// Projection onto K for the sets that have a fixed description.
inline Vector project_onto_set(const ConstraintModel& model, const Vector& u) {
  validate(model);
  detail::require_dims(u.size() == model.p, "project_onto_set: dimension mismatch");
  return std::visit(
      [&](const auto& s) -> Vector {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, MonotoneCone>) {
          return project_monotone(u);
        } else if constexpr (std::is_same_v<S, PositiveMonotoneCone>) {
          return project_positive_monotone(u);
        } else if constexpr (std::is_same_v<S, NonNegOrthant>) {
          return u.cwiseMax(0.0);
        } else if constexpr (std::is_same_v<S, L1Ball>) {
          return project_l1_ball(u, s.radius);
        } else {
          throw ConfigError("project_onto_set: the SLOPE ball has no radius until a pilot is selected");
        }
      },
      model.set);
}

/// Membership of v in K up to `tol`.
inline bool is_feasible(const ConstraintModel& model, const Vector& v, double tol = 1e-8) {
  if (v.size() != model.p) return false;
  return std::visit(
      [&](const auto& s) -> bool {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, MonotoneCone>) {
          return is_nondecreasing(v, tol);
        } else if constexpr (std::is_same_v<S, PositiveMonotoneCone>) {
          return is_nondecreasing(v, tol) && (v.size() == 0 || v.minCoeff() >= -tol);
        } else if constexpr (std::is_same_v<S, NonNegOrthant>) {
          return v.size() == 0 || v.minCoeff() >= -tol;
        } else if constexpr (std::is_same_v<S, L1Ball>) {
          return v.lpNorm<1>() <= s.radius + tol;
        } else {
          return true;  // the SLOPE ball is built to contain v
        }
      },
      model.set);
}

/// Recomputes the tangent-cone descriptor of K at v from v itself.
inline TangentConeAt tangent_cone_at(const ConstraintModel& model, const Vector& v) {
  validate(model);
  detail::require_dims(v.size() == model.p, "tangent_cone_at: dimension mismatch");
  auto l1_boundary = [&](double radius) -> TangentConeAt {
    const double norm1 = v.lpNorm<1>();
    if (norm1 < radius * (1.0 - 1e-12)) return FullSpaceTangent{model.p};
    L1BoundaryTangent c{model.p, {}, {}};
    for (Index i = 0; i < v.size(); ++i) {
      if (v(i) != 0.0) {
        c.support.push_back(i);
        c.signs.push_back(v(i) > 0 ? 1 : -1);
      }
    }
    if (c.support.empty()) throw ConfigError("tangent_cone_at: l1 pilot is the zero vector");
    return c;
  };
  return std::visit(
      [&](const auto& s) -> TangentConeAt {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, MonotoneCone>) {
          return MonotoneTangent{constant_pieces(v)};
        } else if constexpr (std::is_same_v<S, PositiveMonotoneCone>) {
          return PositiveMonotoneTangent{constant_pieces(v), v(0) == 0.0};
        } else if constexpr (std::is_same_v<S, NonNegOrthant>) {
          NonNegTangent c{model.p, {}};
          for (Index i = 0; i < v.size(); ++i)
            if (v(i) == 0.0) c.zeros.push_back(i);
          return c;
        } else if constexpr (std::is_same_v<S, L1Ball>) {
          return l1_boundary(s.radius);
        } else {
          return l1_boundary(v.lpNorm<1>());
        }
      },
      model.set);
}

// --- Gaussian width bounds ---------------------------------------------------------

/// sqrt(s log(e p / s)), natural log.
inline double sparse_width(Index s, Index p) {
  const double sd = static_cast<double>(s);
  return std::sqrt(sd * std::log(std::exp(1.0) * static_cast<double>(p) / sd));
}

/// Upper bound on w(T_K(v) ∩ S^{p-1}) before flooring:
///   (positive) monotone with l pieces: sqrt(l log(e p / l));
///   orthant with zero set Z:            sqrt(p - |Z| / 2);
///   l1 / SLOPE ball with support s:     sqrt(s log(e p / s)).
inline double raw_width_bound(const ConstraintModel& model, const TangentConeAt& cone) {
  validate(model);
  validate(cone);
  detail::require_dims(dimension(cone) == model.p, "width_bound: cone and model dimensions differ");
  if (std::holds_alternative<FullSpaceTangent>(cone))
    throw ConfigError("width_bound: tangent cone is the whole space (the l1 pilot is interior)");
  const bool mono = std::holds_alternative<MonotoneCone>(model.set) ||
                    std::holds_alternative<PositiveMonotoneCone>(model.set);
  const bool l1 = std::holds_alternative<L1Ball>(model.set) || std::holds_alternative<SlopeBall>(model.set);
  if (mono) {
    Index l = 0;
    if (const auto* m = std::get_if<MonotoneTangent>(&cone)) l = static_cast<Index>(m->pieces.size());
    else if (const auto* pm = std::get_if<PositiveMonotoneTangent>(&cone)) l = static_cast<Index>(pm->pieces.size());
    else throw ConfigError("width_bound: monotone model needs a piecewise tangent descriptor");
    return sparse_width(l, model.p);
  }
  if (std::holds_alternative<NonNegOrthant>(model.set)) {
    const auto* nn = std::get_if<NonNegTangent>(&cone);
    if (!nn) throw ConfigError("width_bound: orthant model needs a zero-set descriptor");
    return std::sqrt(static_cast<double>(model.p) - 0.5 * static_cast<double>(nn->zeros.size()));
  }
  if (l1) {
    const auto* lb = std::get_if<L1BoundaryTangent>(&cone);
    if (!lb) throw ConfigError("width_bound: l1 model needs a boundary descriptor");
    return sparse_width(static_cast<Index>(lb->support.size()), model.p);
  }
  throw ConfigError("width_bound: unsupported model");
}

/// max(raw bound, a_n).
inline double width_bound(const ConstraintModel& model, const TangentConeAt& cone, double a_n) {
  detail::require(a_n >= 0.0, "width_bound: floor must be >= 0");
  return std::max(raw_width_bound(model, cone), a_n);
}

/// Slowly diverging floor a_n = sqrt(log log max(n, 3)).
inline double width_floor(Index n) {
  return std::sqrt(std::log(std::log(static_cast<double>(std::max<Index>(n, 3)))));
}

}  // namespace debias
