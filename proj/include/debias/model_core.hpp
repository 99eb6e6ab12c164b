#pragma once

// Core data types for the linear model y = X beta + eps: datasets, the
// population covariance designs and noise laws used for simulation, sample
// splitting and the empirical Gram matrix.

#include "debias/random.hpp"
#include "debias/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace debias {

/// A regression sample: design X (n x p) and response y (length n).
struct Dataset {
  Matrix X;
  Vector y;

  Index rows() const { return X.rows(); }
  Index cols() const { return X.cols(); }

  void check() const {
    detail::require_dims(X.rows() == y.size(),
                         "dataset: X has " + std::to_string(X.rows()) + " rows but y has " +
                             std::to_string(y.size()) + " entries");
    detail::require_dims(X.cols() >= 1, "dataset: X has no columns");
  }
};

/// Two disjoint halves of a parent sample. `first_rows` / `second_rows`
/// hold the parent row index of every row of each half.
struct SplitDataset {
  Dataset first;
  Dataset second;
  std::vector<Index> first_rows;
  std::vector<Index> second_rows;
};

// --- covariance designs ----------------------------------------------------

struct IdentityCov {};
struct ToeplitzCov {
  double rho = 0.4;
};
/// Q diag(d) Q^T with Q a seeded random orthogonal matrix and d uniform on
/// [lambda_min, lambda_max].
struct BoundedEigCov {
  double lambda_min = 0.5;
  double lambda_max = 2.0;
  std::uint64_t seed = 0;
};

struct CovarianceSpec {
  std::variant<IdentityCov, ToeplitzCov, BoundedEigCov> kind;
  Index p = 1;
};

inline void validate(const CovarianceSpec& spec) {
  detail::require(spec.p >= 1, "covariance: p must be >= 1");
  if (const auto* t = std::get_if<ToeplitzCov>(&spec.kind)) {
    detail::require(t->rho > 0.0 && t->rho < 1.0, "covariance: Toeplitz rho must lie in (0,1)");
  } else if (const auto* b = std::get_if<BoundedEigCov>(&spec.kind)) {
    detail::require(b->lambda_min > 0.0, "covariance: lambda_min must be > 0");
    detail::require(b->lambda_max >= b->lambda_min, "covariance: lambda_max must be >= lambda_min");
  }
}

inline Matrix make_covariance(const CovarianceSpec& spec) {
  validate(spec);
  const Index p = spec.p;
  if (std::holds_alternative<IdentityCov>(spec.kind)) return Matrix::Identity(p, p);
  if (const auto* t = std::get_if<ToeplitzCov>(&spec.kind)) {
    Matrix S(p, p);
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < p; ++j) S(i, j) = std::pow(t->rho, static_cast<double>(std::abs(i - j)));
    return S;
  }
  const auto& b = std::get<BoundedEigCov>(spec.kind);
  Engine eng = make_engine(b.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(b.lambda_min, b.lambda_max);
  Matrix G(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) G(i, j) = normal(eng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  // Fix column signs so that Q is Haar distributed.
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < p; ++j)
    if (R(j, j) < 0) Q.col(j) *= -1.0;
  Vector d(p);
  for (Index i = 0; i < p; ++i) d(i) = unif(eng);
  Matrix S = Q * d.asDiagonal() * Q.transpose();
  return 0.5 * (S + S.transpose());
}

// --- noise laws --------------------------------------------------------------

struct GaussianNoise {
  double sigma = 1.0;
};
/// sigma * (+-1) with equal probability.
struct ScaledRademacherNoise {
  double sigma = 1.0;
};
/// Uniform on [-sqrt(3) sigma, sqrt(3) sigma].
struct UniformCenteredNoise {
  double sigma = 1.0;
};

struct NoiseSpec {
  std::variant<GaussianNoise, ScaledRademacherNoise, UniformCenteredNoise> kind;

  double sigma() const {
    return std::visit([](const auto& k) { return k.sigma; }, kind);
  }
};

/// Zero-mean, standard deviation `spec.sigma()`.
class NoiseSampler {
 public:
  explicit NoiseSampler(const NoiseSpec& spec) : spec_(spec) {
    detail::require(spec.sigma() >= 0.0, "noise: sigma must be >= 0");
  }

  double operator()(Engine& eng) {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, GaussianNoise>) {
            return k.sigma * normal_(eng);
          } else if constexpr (std::is_same_v<K, ScaledRademacherNoise>) {
            return coin_(eng) ? k.sigma : -k.sigma;
          } else {
            return k.sigma * std::sqrt(3.0) * (2.0 * unit_(eng) - 1.0);
          }
        },
        spec_.kind);
  }

 private:
  NoiseSpec spec_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::bernoulli_distribution coin_{0.5};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

// --- generation, splitting, Gram ---------------------------------------------

/// Rows of X are i.i.d. N(0, Sigma) with Sigma = make_covariance(cov);
/// y = X beta_star + eps. Identical arguments give bit-identical output.
inline Dataset generate_dataset(const Vector& beta_star, const CovarianceSpec& cov,
                                const NoiseSpec& noise, Index n, std::uint64_t seed) {
  detail::require_dims(beta_star.size() == cov.p,
                       "generate_dataset: beta_star has length " + std::to_string(beta_star.size()) +
                           " but covariance dimension is " + std::to_string(cov.p));
  detail::require(n >= 2, "generate_dataset: n must be >= 2");
  const Index p = cov.p;
  Engine eng = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix Z(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) Z(i, j) = normal(eng);

  Dataset d;
  if (std::holds_alternative<IdentityCov>(cov.kind)) {
    d.X = std::move(Z);
  } else {
    const Matrix S = make_covariance(cov);
    Eigen::LLT<Matrix> llt(S);
    if (llt.info() != Eigen::Success) throw ConfigError("generate_dataset: covariance is not positive definite");
    const Matrix L = llt.matrixL();
    d.X = Z * L.transpose();
  }
  NoiseSampler eps(noise);
  d.y = d.X * beta_star;
  for (Index i = 0; i < n; ++i) d.y(i) += eps(eng);
  return d;
}

inline Dataset select_rows(const Dataset& d, const std::vector<Index>& rows) {
  Dataset out;
  out.X.resize(static_cast<Index>(rows.size()), d.cols());
  out.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.X.row(static_cast<Index>(k)) = d.X.row(rows[k]);
    out.y(static_cast<Index>(k)) = d.y(rows[k]);
  }
  return out;
}

/// Random split into two halves of equal size. With an odd row count one
/// randomly chosen row is dropped.
inline SplitDataset split_sample(const Dataset& d, std::uint64_t seed) {
  d.check();
  detail::require(d.rows() >= 4, "split_sample: need at least 4 rows");
  std::vector<Index> perm(static_cast<std::size_t>(d.rows()));
  std::iota(perm.begin(), perm.end(), Index{0});
  Engine eng = make_engine(seed);
  std::shuffle(perm.begin(), perm.end(), eng);
  const std::size_t half = perm.size() / 2;

  SplitDataset s;
  s.first_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(half));
  s.second_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(half),
                       perm.begin() + static_cast<std::ptrdiff_t>(2 * half));
  s.first = select_rows(d, s.first_rows);
  s.second = select_rows(d, s.second_rows);
  return s;
}

/// X^T X / n.
inline Matrix gram_matrix(const Matrix& X) {
  detail::require_dims(X.rows() >= 1 && X.cols() >= 1, "gram_matrix: empty design");
  Matrix G = Matrix::Zero(X.cols(), X.cols());
  G.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose(), 1.0 / static_cast<double>(X.rows()));
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  return G;
}

/// Subtracts column means of X and the mean of y. Used when ingesting real
/// data with an intercept; simulated designs are already zero-mean.
inline Dataset center_columns(Dataset d) {
  const Eigen::RowVectorXd means = d.X.colwise().mean();
  d.X.rowwise() -= means;
  d.y.array() -= d.y.mean();
  return d;
}

}  // namespace debias
