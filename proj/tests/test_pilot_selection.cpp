#include "debias/pilot_selection.hpp"
#include "debias/random.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace debias;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

double crit_width(Index s, Index p, Index n) {
  return std::sqrt(s * std::log(std::exp(1.0) * double(p) / double(s)) / double(n));
}

void check_invariants(const Vector& beta_hat, const PilotSelection& sel, Index n) {
  EXPECT_TRUE(is_feasible(sel.model, sel.v, 1e-8));
  EXPECT_GT(sel.width, 0.0);
  EXPECT_NEAR(sel.objective, (beta_hat - sel.v).norm() + sel.raw_width / std::sqrt(double(n)), 1e-10);
  EXPECT_EQ(sel.width, std::max(sel.raw_width, width_floor(n)));
  const TangentConeAt again = tangent_cone_at(sel.model, sel.v);
  EXPECT_EQ(again.index(), sel.cone_at_v.index());
  EXPECT_NEAR(raw_width_bound(sel.model, again), sel.raw_width, 1e-15);
}

}  // namespace

TEST(SelectMonotone, Examples) {
  const auto c = select_v_monotone(Vector::Constant(4, 1.5), 10);
  EXPECT_EQ(c.selected, 1);
  EXPECT_EQ(c.v, Vector::Constant(4, 1.5));

  const auto a = select_v_monotone(vec({0, 1}), 100);
  EXPECT_EQ(a.selected, 2);
  EXPECT_EQ(a.v, vec({0, 1}));
  EXPECT_NEAR(a.objective, 0.1414, 1e-4);

  const auto b = select_v_monotone(vec({0, 0.01}), 1);
  EXPECT_EQ(b.selected, 1);
  EXPECT_LT((b.v - vec({0.005, 0.005})).norm(), 1e-15);
  EXPECT_NEAR(b.objective, 1.3083, 1e-4);
}

TEST(SelectMonotone, ToleratesSolverNoiseOnly) {
  const auto s = select_v_monotone(vec({0, 1, 1 - 1e-9, 2}), 50);
  EXPECT_TRUE(is_nondecreasing(s.v));
  EXPECT_THROW(select_v_monotone(vec({0, 1, 0.5}), 50), ConfigError);
}

TEST(SelectMonotone, MatchesExhaustiveSearchAndPieceCount) {
  Engine eng = make_engine(31);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const Index p = 1 + t % 10;
    const Index n = 1 + (t * 37) % 400;
    Vector u(p);
    for (Index i = 0; i < p; ++i) u(i) = N(eng);
    std::sort(u.data(), u.data() + p);
    const auto sel = select_v_monotone(u, n);
    double best = std::numeric_limits<double>::infinity();
    Index best_l = 0;
    for (Index l = 1; l <= p; ++l) {
      const double c = std::sqrt(oracle::best_segmentation_cost(u, l)) + crit_width(l, p, n);
      if (c < best - 1e-12) {
        best = c;
        best_l = l;
      }
    }
    EXPECT_NEAR(sel.objective, best, 1e-9);
    EXPECT_EQ(sel.selected, best_l);
    EXPECT_EQ(static_cast<Index>(constant_pieces(sel.v).size()), sel.selected);
    check_invariants(u, sel, n);
  }
}

TEST(SelectPositiveMonotone, Examples) {
  const auto z = select_v_positive_monotone(Vector::Zero(3), 10);
  EXPECT_EQ(z.v, Vector::Zero(3));
  EXPECT_TRUE(std::get<PositiveMonotoneTangent>(z.cone_at_v).first_piece_is_zero);

  const auto a = select_v_positive_monotone(vec({0, 0, 1, 1}), 100);
  EXPECT_EQ(a.v, vec({0, 0, 1, 1}));
  const auto& cone = std::get<PositiveMonotoneTangent>(a.cone_at_v);
  EXPECT_EQ(cone.pieces, (std::vector<Index>{2, 2}));
  EXPECT_TRUE(cone.first_piece_is_zero);

  const auto b = select_v_positive_monotone(Vector::Constant(3, 0.4), 10);
  EXPECT_FALSE(std::get<PositiveMonotoneTangent>(b.cone_at_v).first_piece_is_zero);

  EXPECT_THROW(select_v_positive_monotone(vec({-0.1, 1}), 10), ConfigError);
}

TEST(SelectNonNeg, Examples) {
  const auto z = select_v_nonneg(Vector::Zero(4), 5);
  EXPECT_EQ(z.selected, 4);
  EXPECT_EQ(z.v, Vector::Zero(4));

  const auto a = select_v_nonneg(vec({0.001, 5}), 1);
  EXPECT_EQ(a.selected, 1);
  EXPECT_EQ(a.v, vec({0, 5}));
  EXPECT_NEAR(a.objective, 1.2257, 1e-4);
  EXPECT_NEAR(a.width, std::sqrt(1.5), 1e-15);

  const auto b = select_v_nonneg(vec({1, 2, 1.5, 3}), 1000000);
  EXPECT_EQ(b.selected, 0);
  EXPECT_EQ(b.v, vec({1, 2, 1.5, 3}));

  EXPECT_THROW(select_v_nonneg(vec({-1, 2}), 10), ConfigError);
}

TEST(SelectNonNeg, TiesBreakTowardLowerIndex) {
  const auto s = select_v_nonneg(vec({0.2, 0.2, 3}), 1);
  // Either tied entry may be zeroed first; the lower index goes first.
  if (s.selected == 1) {
    EXPECT_EQ(s.v, vec({0, 0.2, 3}));
  }
  const auto z = std::get<NonNegTangent>(s.cone_at_v);
  EXPECT_EQ(static_cast<Index>(z.zeros.size()), s.selected);
}

TEST(SelectNonNeg, MatchesExhaustiveSearch) {
  Engine eng = make_engine(4);
  std::exponential_distribution<double> E(2.0);
  for (int t = 0; t < 200; ++t) {
    const Index p = 1 + t % 10;
    const Index n = 1 + (t * 53) % 300;
    Vector b(p);
    for (Index i = 0; i < p; ++i) b(i) = E(eng);
    const auto sel = select_v_nonneg(b, n);
    // All 2^p zero patterns: the best uses the smallest entries.
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
      Vector v = b;
      Index s = 0;
      for (Index i = 0; i < p; ++i)
        if (mask >> i & 1) {
          v(i) = 0.0;
          ++s;
        }
      best = std::min(best, (b - v).norm() + std::sqrt((double(p) - 0.5 * double(s)) / double(n)));
    }
    EXPECT_NEAR(sel.objective, best, 1e-10);
    check_invariants(b, sel, n);
  }
}

TEST(SelectL1, Examples) {
  const auto a = select_v_l1(vec({0.9, 0.1, 0}), 1.0, 10000);
  EXPECT_EQ(a.selected, 2);
  EXPECT_LT((a.v - vec({0.9, 0.1, 0})).norm(), 1e-15);
  EXPECT_NEAR(a.objective, 0.0168, 1e-4);

  const auto b = select_v_l1(vec({0, -2, 0}), 2.0, 50);
  EXPECT_EQ(b.selected, 1);
  EXPECT_EQ(b.v, vec({0, -2, 0}));

  EXPECT_LT((l1_sparse_candidate(vec({0.5, 0.2, 0.1}), 1.0, 2) - vec({0.65, 0.35, 0})).norm(), 1e-15);
  EXPECT_THROW(select_v_l1(vec({1, 1}), 1.5, 10), ConfigError);
  EXPECT_THROW(select_v_l1(Vector::Zero(2), 1.0, 10), ConfigError);
}

TEST(SelectL1, CandidateIsNearestSparsePointOnSphere) {
  // Among points with support in the top-s set and |v|_1 = Lambda, the
  // candidate is the nearest; compare against a fine search on p = 3.
  const Vector b = vec({0.5, -0.2, 0.1});
  const Vector c = l1_sparse_candidate(b, 1.0, 2);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 200000; ++k) {
    const double a = -1.0 + 2.0 * k / 200000.0;
    Vector v = vec({a, 0, 0});
    v(1) = (1.0 - std::abs(a));
    for (double s : {-1.0, 1.0}) {
      v(1) = s * (1.0 - std::abs(a));
      best = std::min(best, (b - v).norm());
    }
  }
  EXPECT_NEAR((b - c).norm(), best, 1e-5);
  EXPECT_NEAR(c.lpNorm<1>(), 1.0, 1e-12);
}

TEST(SelectL1, MatchesEnumerationAndBudget) {
  Engine eng = make_engine(8);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const Index p = 1 + t % 10;
    const Index n = 1 + (t * 71) % 1000;
    Vector b(p);
    for (Index i = 0; i < p; ++i) b(i) = (t + i) % 3 == 0 ? 0.0 : N(eng);
    if (b.isZero()) b(0) = 1.0;
    const double L = b.lpNorm<1>() * (1.0 + 0.3 * std::abs(N(eng)));
    const auto sel = select_v_l1(b, L, n);
    const Index nnz = (b.array() != 0.0).count();
    double best = std::numeric_limits<double>::infinity();
    for (Index s = 1; s <= nnz; ++s)
      best = std::min(best, (b - l1_sparse_candidate(b, L, s)).norm() + crit_width(s, p, n));
    EXPECT_NEAR(sel.objective, best, 1e-10);
    EXPECT_NEAR(sel.v.lpNorm<1>(), L, 1e-10 * std::max(1.0, L));
    check_invariants(b, sel, n);
  }
}

TEST(SelectSlope, Examples) {
  const Vector b = vec({1, 0.5, 0.1});
  const Index p = 3, s_u = 2;
  const double log_term = std::log(2.0 * std::exp(1.0) * p / s_u);
  const Index n = 100;
  // Choose C so that the radius term equals 0.03.
  const double C = std::sqrt(0.03 * n / (s_u * log_term));
  const auto sel = select_v_slope(b, s_u, C, n);
  EXPECT_LT((sel.v - vec({1.1, 0.6, 0})).norm(), 1e-12);
  EXPECT_EQ(std::get<L1BoundaryTangent>(sel.cone_at_v).support, (std::vector<Index>{0, 1}));

  const double small_C = std::sqrt(0.005 * n / (s_u * log_term));
  try {
    select_v_slope(b, s_u, small_C, n);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("C too small"), std::string::npos);
  }

  const Vector mixed = vec({-0.4, 0.2, 0.0});
  const double Cfull = 2.0;
  const double radius2 = Cfull * Cfull * 3 * std::log(2.0 * std::exp(1.0)) / n;
  const double c = std::sqrt(radius2 / 3);
  const auto full = select_v_slope(mixed, 3, Cfull, n);
  EXPECT_LT((full.v - vec({-0.4 - c, 0.2 + c, c})).norm(), 1e-12);
  check_invariants(mixed, full, n);
}

TEST(SelectSlope, MaximalL1AmongFeasibleSparsePoints) {
  // Random search over s_u-sparse points within the radius never beats v.
  const Vector b = vec({1, 0.5, 0.1});
  const double C = 1.3;
  const Index n = 100;
  const auto sel = select_v_slope(b, 2, C, n);
  const double r2 = C * C * 2 * std::log(2.0 * std::exp(1.0) * 3 / 2) / n;
  Engine eng = make_engine(6);
  std::normal_distribution<double> N(0.0, 0.3);
  for (int k = 0; k < 100000; ++k) {
    Vector v = b;
    v(k % 3) = 0.0;
    for (Index i = 0; i < 3; ++i)
      if (i != k % 3) v(i) += N(eng);
    if ((v - b).squaredNorm() <= r2) {
      EXPECT_LE(v.lpNorm<1>(), sel.v.lpNorm<1>() + 1e-12);
    }
  }
}

TEST(ChooseC, Examples) {
  EXPECT_NEAR(choose_C_slope(1000000, 1000, 5, 0.25), 2.373, 1e-3);
  EXPECT_NEAR(choose_C_slope(1000000, 1000, 5, 1e-9), 1.0, 1e-6);
  std::string warning;
  const double c = choose_C_slope(100, 1000, 50, 0.25, &warning);
  EXPECT_LT(c, 1.0);
  EXPECT_FALSE(warning.empty());
  std::string none;
  choose_C_slope(1000000, 1000, 5, 0.25, &none);
  EXPECT_TRUE(none.empty());
  EXPECT_THROW(choose_C_slope(10, 10, 2, 1.0), ConfigError);
}
