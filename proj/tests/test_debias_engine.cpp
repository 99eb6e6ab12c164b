#include "debias/debias_engine.hpp"
#include "debias/model_core.hpp"
#include "debias/random.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace debias;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Matrix random_gram(Index n, Index p, std::uint64_t seed) {
  Engine eng = make_engine(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = N(eng);
  return gram_matrix(X);
}

Matrix one_by_one(double g) { return Matrix::Constant(1, 1, g); }

/// sup over T ∩ S of |w'u| through the oracle projection.
double oracle_sup(const Vector& w, const oracle::Polyhedron& T) {
  const double a = oracle::project_enumerate(w, T).norm();
  const double b = oracle::project_enumerate(w, oracle::negate(T)).norm();
  return std::max(a, b);
}

}  // namespace

TEST(Psi, Examples) {
  const Matrix G = random_gram(30, 3, 1);
  const Vector target = vec({0, 0, 1});
  const Vector eta = G.ldlt().solve(target);
  const auto e = psi(eta, G, target, FullSpaceTangent{3}, 0.3);
  EXPECT_NEAR(e.value, -0.3, 1e-12);

  const Matrix I = Matrix::Identity(3, 3);
  const Vector w_eta = vec({0.5, -2, 1});
  const NonNegTangent orthant{3, {0, 1, 2}};
  const auto o = psi(w_eta, I, Vector::Zero(3), orthant, 0.1);
  EXPECT_NEAR(o.value, std::max(std::sqrt(0.25 + 1.0), 2.0) - 0.1, 1e-14);
  EXPECT_EQ(o.branch, 1);

  const auto f = psi(w_eta, I, Vector::Zero(3), FullSpaceTangent{3}, 0.1);
  EXPECT_NEAR(f.value, w_eta.norm() - 0.1, 1e-14);
}

TEST(Psi, VanishingProjectionsAreFeasible) {
  const NonNegTangent orthant{2, {0, 1}};
  const auto e = psi(Vector::Zero(2), Matrix::Identity(2, 2), Vector::Zero(2), orthant, 0.2);
  EXPECT_EQ(e.branch, -1);
  EXPECT_EQ(e.value, -0.2);
  EXPECT_EQ(psi_subgradient(e, Matrix::Identity(2, 2)), Vector::Zero(2));
}

TEST(Psi, SubgradientInequalityAndDescent) {
  Engine eng = make_engine(12);
  std::normal_distribution<double> N(0.0, 1.0);
  const Matrix G = random_gram(15, 4, 3);
  const std::vector<TangentConeAt> cones = {MonotoneTangent{{2, 2}}, NonNegTangent{4, {1, 3}},
                                            L1BoundaryTangent{4, {0, 2}, {1, -1}}, FullSpaceTangent{4}};
  const double h = 1e-6;
  int checked = 0;
  for (int t = 0; t < 50; ++t) {
    const auto& cone = cones[static_cast<std::size_t>(t) % cones.size()];
    Vector eta(4), target = vec({0, 0, 0, 1}), d(4);
    for (Index i = 0; i < 4; ++i) {
      eta(i) = N(eng);
      d(i) = N(eng);
    }
    const auto e = psi(eta, G, target, cone, 0.01);
    const Vector g = psi_subgradient(e, G);
    const double up = psi(Vector(eta + h * d), G, target, cone, 0.01).value;
    EXPECT_GE((up - e.value) / h, g.dot(d) - 1e-4);
    if (std::abs(e.norm_tangent - e.norm_negative) > 1e-3) {
      const double down = psi(Vector(eta - h * g), G, target, cone, 0.01).value;
      EXPECT_LE(down - e.value, -h * g.squaredNorm() + 1e-4 * h);
      ++checked;
    }
  }
  EXPECT_GT(checked, 25);
}

TEST(SolveEta, OneDimensionalAnalytic) {
  for (double g : {0.5, 1.0, 2.5}) {
    for (double lam : {0.1, 0.4, 0.8}) {
      // lambda = rho * width / sqrt(n) with rho = 1, n = 1.
      EtaConfig cfg;
      cfg.step = ConstantStep{1e-5};
      cfg.max_iters = 1000000;
      cfg.feasibility_patience = cfg.max_iters;
      const auto r = solve_eta(one_by_one(g), vec({1}), FullSpaceTangent{1}, lam, 1, cfg);
      EXPECT_NEAR(r.eta(0), (1.0 - lam) / g, 1e-4) << "g " << g << " lambda " << lam;
      EXPECT_NEAR(r.objective, std::sqrt(g) * r.eta(0), 1e-12);
      EXPECT_DOUBLE_EQ(r.lambda, lam);
    }
  }
}

TEST(SolveEta, ZeroIsOptimalWhenFeasible) {
  const auto r = solve_eta(one_by_one(2.0), vec({1}), FullSpaceTangent{1}, 1.5, 1);
  EXPECT_EQ(r.eta(0), 0.0);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_TRUE(r.feasible);
}

TEST(SolveEta, MatchesRandomizedFeasibleSearch) {
  Engine eng = make_engine(99);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  struct Case {
    TangentConeAt cone;
    oracle::Polyhedron poly;
  };
  const std::vector<Case> cases = {
      {MonotoneTangent{{3}}, oracle::monotone_cone(3)},
      {NonNegTangent{3, {0, 2}}, oracle::nonneg_coords(3, {0, 2})},
      {MonotoneTangent{{1, 2}}, oracle::blockwise_monotone({1, 2}, false)},
  };
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const Matrix G = random_gram(12, 3, 40 + c);
    const Vector target = vec({0, 0, 1});
    const double h = 0.003;
    EtaConfig cfg;
    cfg.step = ConstantStep{h};
    cfg.max_iters = static_cast<Index>(std::ceil(1.0 / (h * h)));
    const auto r = solve_eta(G, target, cases[c].cone, 1.0, 11, cfg);
    ASSERT_NEAR(r.lambda, 1.0 / std::sqrt(11.0), 1e-12);
    EXPECT_LE(oracle_sup(G * r.eta - target, cases[c].poly), r.lambda + 1e-9);

    const Vector center = G.ldlt().solve(target);
    const double radius = 2.0 * center.cwiseAbs().maxCoeff() + 1.0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 1000000; ++k) {
      Vector eta(3);
      for (Index i = 0; i < 3; ++i) eta(i) = radius * U(eng);
      const double obj = std::sqrt(std::max(eta.dot(G * eta), 0.0));
      if (obj >= best) continue;
      if (oracle_sup(G * eta - target, cases[c].poly) <= r.lambda) best = obj;
    }
    ASSERT_TRUE(std::isfinite(best));
    EXPECT_LE(r.objective, 1.05 * best) << "case " << c;
  }
}

TEST(SolveEta, ReturnedPointIsFeasibleAndBestOfTrace) {
  const Index n = 60, p = 8;
  const Matrix G = random_gram(n, p, 5);
  const auto cone = tangent_cone_at({MonotoneCone{}, p}, vec({0, 0, 0, 1, 1, 2, 2, 2}));
  EtaConfig cfg;
  cfg.record_trace = true;
  cfg.max_iters = 3000;
  const auto r = solve_eta(G, unit_target(p, p - 1), cone, 2.0, n, cfg);
  EXPECT_TRUE(r.feasible);
  EXPECT_LE(psi(r.eta, G, unit_target(p, p - 1), cone, r.lambda).value, 1e-12);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : r.trace)
    if (t.psi <= 0.0) best = std::min(best, t.objective);
  EXPECT_DOUBLE_EQ(r.objective, best);
  std::ostringstream os;
  write_trace_csv(os, r);
  EXPECT_EQ(os.str().substr(0, 22), "iter,objective,psi,rho");
}

TEST(SolveEta, RhoGrowsWhenInfeasible) {
  const Matrix G = random_gram(40, 5, 6);
  EtaConfig cfg;
  cfg.rho = 1e-4;
  cfg.feasibility_patience = 20;
  cfg.max_iters = 5000;
  const auto r = solve_eta(G, unit_target(5, 4), FullSpaceTangent{5}, 1.0, 40, cfg);
  EXPECT_GT(r.rho_final, cfg.rho);
  EXPECT_DOUBLE_EQ(r.lambda, r.rho_final / std::sqrt(40.0));
}

TEST(SolveEta, InfeasibleCarriesFinalRho) {
  const Matrix G = random_gram(40, 5, 6);
  EtaConfig cfg;
  cfg.rho = 1e-6;
  cfg.rho_max = 1e-5;
  cfg.feasibility_patience = 10;
  cfg.max_iters = 50;
  try {
    solve_eta(G, unit_target(5, 4), FullSpaceTangent{5}, 1.0, 40, cfg);
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_GE(e.rho_final(), 1e-6);
    EXPECT_LE(e.rho_final(), 1e-5);
  }
}

TEST(SolveEta, ConfigValidation) {
  const Matrix G = Matrix::Identity(2, 2);
  EtaConfig cfg;
  cfg.rho_growth = 1.0;
  EXPECT_THROW(solve_eta(G, unit_target(2, 0), FullSpaceTangent{2}, 1.0, 4, cfg), ConfigError);
  EXPECT_THROW(solve_eta(G, unit_target(2, 0), FullSpaceTangent{2}, 0.0, 4), ConfigError);
  EXPECT_THROW(solve_eta(G, unit_target(2, 0), FullSpaceTangent{3}, 1.0, 4), DimensionError);
}

TEST(SolveEta, ContrastTarget) {
  const Index n = 80, p = 6;
  const Matrix G = random_gram(n, p, 17);
  Vector gamma = vec({0, 0, 0, 0, 1, 1}) / std::sqrt(2.0);
  const NonNegTangent cone{p, {0, 1}};
  const auto r = solve_eta(G, gamma, cone, 2.0, n);
  EXPECT_TRUE(r.feasible);
  EXPECT_LE(psi(r.eta, G, gamma, cone, r.lambda).value, 1e-12);
}

TEST(SolveEtaSubGaussian, LargeRhoPrimeMatchesGaussianSolve) {
  const Index n = 50, p = 5;
  Engine eng = make_engine(2);
  std::normal_distribution<double> N(0.0, 1.0);
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = N(eng);
  const Matrix G = gram_matrix(X);
  EtaConfig cfg;
  cfg.max_iters = 2000;
  cfg.rho_prime = 1e9;
  const NonNegTangent cone{p, {1, 2}};
  const auto a = solve_eta(G, unit_target(p, 4), cone, 2.0, n, cfg);
  const auto b = solve_eta_subgaussian(G, unit_target(p, 4), cone, 2.0, n, X, cfg);
  EXPECT_EQ(a.eta, b.eta);
  EXPECT_EQ(a.objective, b.objective);
}

TEST(SolveEtaSubGaussian, SecondConstraintHolds) {
  const Index n = 50, p = 5;
  Engine eng = make_engine(3);
  std::normal_distribution<double> N(0.0, 1.0);
  Matrix X(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) X(i, j) = N(eng);
  const Matrix G = gram_matrix(X);
  EtaConfig cfg;
  cfg.rho_prime = 0.3;
  cfg.feasibility_patience = 200;
  cfg.max_iters = 20000;
  const auto r = solve_eta_subgaussian(G, unit_target(p, 4), FullSpaceTangent{p}, 2.0, n, X, cfg);
  EXPECT_LE((X * r.eta).cwiseAbs().maxCoeff(), r.rho_prime_final * std::sqrt(std::log(double(n))) + 1e-12);
  EXPECT_LE(psi(r.eta, G, unit_target(p, 4), FullSpaceTangent{p}, r.lambda).value, 1e-12);
}

TEST(PsiPrime, SubgradientAtLargestRow) {
  Matrix X(2, 2);
  X << 1, 0, 0, -3;
  EXPECT_EQ(psi_prime_subgradient(X, vec({1, 1})), vec({0, 3}));
  // At eta = 0 the constraint value is -rho' sqrt(log n).
  EXPECT_EQ((X * Vector::Zero(2)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(DebiasTarget, Examples) {
  Dataset second;
  second.X = Matrix::Ones(1, 1);
  second.y = vec({2});
  EXPECT_DOUBLE_EQ(debias_target(vec({1}), vec({1}), second, vec({1})), 2.0);
  EXPECT_DOUBLE_EQ(debias_target(vec({1}), vec({0}), second, vec({1})), 1.0);

  const Matrix G = random_gram(10, 3, 1);
  Dataset exact;
  exact.X = Matrix::Random(10, 3);
  const Vector v = vec({1, 2, 3});
  exact.y = exact.X * v;
  EXPECT_NEAR(debias_target(v, vec({0.3, -1, 2}), exact, unit_target(3, 1)), 2.0, 1e-12);
}

TEST(DebiasKnownSigma, Examples) {
  Dataset d;
  d.X = Matrix::Random(20, 3);
  const Vector b = vec({1, -1, 0.5});
  d.y = d.X * b;
  EXPECT_LT((debias_known_sigma(b, Matrix::Identity(3, 3), d) - b).norm(), 1e-12);
  d.y = Vector::Random(20);
  EXPECT_LT((debias_known_sigma(Vector::Zero(3), Matrix::Identity(3, 3), d) - d.X.transpose() * d.y / 20.0).norm(),
            1e-12);
}

TEST(DeltaDiagnostic, ExamplesAndBound) {
  const Index n = 40, p = 4;
  const Matrix G = random_gram(n, p, 8);
  const Vector target = unit_target(p, 3);
  const Vector v = vec({0, 0, 1, 1});
  EXPECT_EQ(delta_diagnostic(vec({1, 2, 3, 4}), G, target, v, v, n, 0.1).delta, 0.0);
  const Vector exact = G.ldlt().solve(target);
  EXPECT_NEAR(delta_diagnostic(exact, G, target, v, vec({1, 2, 3, 4}), n, 0.1).delta, 0.0, 1e-10);

  const ConstraintModel model{MonotoneCone{}, p};
  const auto cone = tangent_cone_at(model, v);
  const auto r = solve_eta(G, target, cone, 1.5, n);
  Engine eng = make_engine(4);
  std::normal_distribution<double> N(0.0, 1.0);
  int inside = 0;
  for (int t = 0; t < 200; ++t) {
    Vector beta(p);
    for (Index i = 0; i < p; ++i) beta(i) = v(i) + N(eng);
    if (!in_tangent_cone(beta - v, cone)) continue;
    ++inside;
    const auto d = delta_diagnostic(r.eta, G, target, v, beta, n, r.lambda);
    EXPECT_LE(std::abs(d.delta), d.bound + 1e-8);
  }
  EXPECT_GT(inside, 10);
}

TEST(UnitTarget, Range) {
  EXPECT_EQ(unit_target(3, 2), vec({0, 0, 1}));
  EXPECT_THROW(unit_target(3, 3), ConfigError);
}
