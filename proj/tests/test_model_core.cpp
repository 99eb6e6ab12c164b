#include "debias/dataset_io.hpp"
#include "debias/model_core.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <set>
#include <sstream>

using namespace debias;

TEST(Covariance, ToeplitzEntries) {
  const Matrix S = make_covariance({ToeplitzCov{0.4}, 3});
  Matrix expected(3, 3);
  expected << 1, 0.4, 0.16, 0.4, 1, 0.4, 0.16, 0.4, 1;
  EXPECT_LT((S - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Covariance, Identity) {
  EXPECT_EQ(make_covariance({IdentityCov{}, 2}), Matrix::Identity(2, 2));
}

TEST(Covariance, BoundedEigSpectrum) {
  const Matrix S = make_covariance({BoundedEigCov{0.5, 2.0, 7}, 4});
  EXPECT_LT((S - S.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  EXPECT_GE(es.eigenvalues().minCoeff(), 0.5 - 1e-12);
  EXPECT_LE(es.eigenvalues().maxCoeff(), 2.0 + 1e-12);
}

TEST(Covariance, RejectsBadParameters) {
  EXPECT_THROW(make_covariance({ToeplitzCov{1.0}, 3}), ConfigError);
  EXPECT_THROW(make_covariance({ToeplitzCov{0.0}, 3}), ConfigError);
  EXPECT_THROW(make_covariance({BoundedEigCov{0.0, 1.0, 1}, 3}), ConfigError);
  EXPECT_THROW(make_covariance({BoundedEigCov{2.0, 1.0, 1}, 3}), ConfigError);
}

TEST(Generate, ZeroSignalZeroNoise) {
  const Dataset d = generate_dataset(Vector::Zero(3), {ToeplitzCov{0.4}, 3}, {GaussianNoise{0.0}}, 5, 11);
  EXPECT_EQ(d.y, Vector::Zero(5));
}

TEST(Generate, NoiselessOneDimensional) {
  const Dataset d = generate_dataset(Vector::Ones(1), {IdentityCov{}, 1}, {GaussianNoise{0.0}}, 3, 2);
  for (Index i = 0; i < 3; ++i) EXPECT_EQ(d.y(i), d.X(i, 0));
}

TEST(Generate, SampleCovarianceMatchesToeplitz) {
  Vector b(2);
  b << 1, -1;
  const Dataset d = generate_dataset(b, {ToeplitzCov{0.4}, 2}, {GaussianNoise{1.0}}, 10000, 99);
  const Matrix S = d.X.transpose() * d.X / 10000.0;
  EXPECT_LT((S - make_covariance({ToeplitzCov{0.4}, 2})).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Generate, Reproducible) {
  const Vector b = Vector::LinSpaced(4, 0, 1);
  const Dataset a = generate_dataset(b, {BoundedEigCov{0.5, 2, 3}, 4}, {UniformCenteredNoise{0.7}}, 20, 5);
  const Dataset c = generate_dataset(b, {BoundedEigCov{0.5, 2, 3}, 4}, {UniformCenteredNoise{0.7}}, 20, 5);
  EXPECT_EQ(a.X, c.X);
  EXPECT_EQ(a.y, c.y);
  const Dataset e = generate_dataset(b, {BoundedEigCov{0.5, 2, 3}, 4}, {UniformCenteredNoise{0.7}}, 20, 6);
  EXPECT_NE(a.y, e.y);
}

TEST(Generate, DimensionMismatch) {
  EXPECT_THROW(generate_dataset(Vector::Zero(3), {IdentityCov{}, 2}, {GaussianNoise{1}}, 5, 1), DimensionError);
}

class NoiseLaw : public ::testing::TestWithParam<int> {};

TEST_P(NoiseLaw, MeanZeroWithRequestedSd) {
  const double s = 1.7;
  NoiseSpec spec;
  switch (GetParam()) {
    case 0: spec.kind = GaussianNoise{s}; break;
    case 1: spec.kind = ScaledRademacherNoise{s}; break;
    default: spec.kind = UniformCenteredNoise{s}; break;
  }
  NoiseSampler draw(spec);
  Engine eng = make_engine(123);
  const int N = 1000000;
  double m = 0, m2 = 0;
  for (int i = 0; i < N; ++i) {
    const double x = draw(eng);
    m += x;
    m2 += x * x;
  }
  m /= N;
  const double sd = std::sqrt(m2 / N - m * m);
  EXPECT_NEAR(sd, s, 0.01 * s);
  EXPECT_NEAR(m, 0.0, 5 * s / std::sqrt(double(N)));
}

INSTANTIATE_TEST_SUITE_P(AllKinds, NoiseLaw, ::testing::Values(0, 1, 2));

namespace {

Dataset indexed_dataset(Index n) {
  Dataset d;
  d.X = Matrix::Zero(n, 1);
  d.y = Vector::LinSpaced(n, 0, static_cast<double>(n - 1));
  d.X.col(0) = d.y;
  return d;
}

}  // namespace

TEST(Split, EvenPartition) {
  const SplitDataset s = split_sample(indexed_dataset(10), 3);
  ASSERT_EQ(s.first.rows(), 5);
  ASSERT_EQ(s.second.rows(), 5);
  std::set<Index> all(s.first_rows.begin(), s.first_rows.end());
  all.insert(s.second_rows.begin(), s.second_rows.end());
  EXPECT_EQ(all.size(), 10u);
  EXPECT_EQ(*all.begin(), 0);
  EXPECT_EQ(*all.rbegin(), 9);
  for (Index k = 0; k < 5; ++k) EXPECT_EQ(s.first.y(k), double(s.first_rows[std::size_t(k)]));
}

TEST(Split, OddDropsOneRow) {
  const SplitDataset s = split_sample(indexed_dataset(11), 4);
  EXPECT_EQ(s.first.rows(), 5);
  EXPECT_EQ(s.second.rows(), 5);
  std::set<Index> all(s.first_rows.begin(), s.first_rows.end());
  all.insert(s.second_rows.begin(), s.second_rows.end());
  EXPECT_EQ(all.size(), 10u);
}

TEST(Split, DeterministicUnderSeed) {
  const Dataset d = indexed_dataset(40);
  EXPECT_EQ(split_sample(d, 8).first_rows, split_sample(d, 8).first_rows);
  EXPECT_NE(split_sample(d, 8).first_rows, split_sample(d, 9).first_rows);
}

TEST(Split, TooFewRows) { EXPECT_THROW(split_sample(indexed_dataset(3), 1), ConfigError); }

TEST(Split, NeverDuplicatesRows) {
  for (Index n = 4; n < 40; ++n) {
    const SplitDataset s = split_sample(indexed_dataset(n), static_cast<std::uint64_t>(n));
    std::vector<Index> rows = s.first_rows;
    rows.insert(rows.end(), s.second_rows.begin(), s.second_rows.end());
    std::sort(rows.begin(), rows.end());
    EXPECT_EQ(std::adjacent_find(rows.begin(), rows.end()), rows.end());
    EXPECT_GE(static_cast<Index>(rows.size()), n - 1);
  }
}

TEST(Gram, Examples) {
  EXPECT_LT((gram_matrix(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3) / 3.0).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(gram_matrix(Matrix::Ones(4, 1))(0, 0), 1.0);
  Matrix X(2, 2);
  X << 1, 2, 3, 4;
  Matrix expected(2, 2);
  expected << 10, 14, 14, 20;
  EXPECT_LT((gram_matrix(X) - expected / 2.0).norm(), 1e-14);
}

TEST(Gram, SymmetricPsd) {
  const Dataset d = generate_dataset(Vector::Zero(8), {ToeplitzCov{0.7}, 8}, {GaussianNoise{1}}, 5, 1);
  const Matrix G = gram_matrix(d.X);
  EXPECT_LT((G - G.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
}

TEST(Gram, EmptyInput) { EXPECT_THROW(gram_matrix(Matrix(0, 2)), DimensionError); }

TEST(Csv, RoundTripIsExact) {
  const Dataset d = generate_dataset(Vector::LinSpaced(3, -1, 1), {IdentityCov{}, 3}, {GaussianNoise{1}}, 7, 2);
  std::stringstream ss;
  write_dataset_csv(ss, d);
  EXPECT_EQ(ss.str().substr(0, 12), "y,x1,x2,x3\n-");
  const Dataset back = read_dataset_csv(ss);
  EXPECT_EQ(back.X, d.X);
  EXPECT_EQ(back.y, d.y);
}

TEST(Csv, ErrorsCarryLocation) {
  std::stringstream bad("y,x1\n1,2\n3,oops\n");
  try {
    read_dataset_csv(bad, "data.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("data.csv:3"), std::string::npos);
  }
  std::stringstream header("a,b\n");
  EXPECT_THROW(read_dataset_csv(header), IoError);
  EXPECT_THROW(read_dataset_csv(std::string("/nonexistent/file.csv")), IoError);
}

TEST(Centering, RemovesMeans) {
  const Dataset d = generate_dataset(Vector::Ones(2), {IdentityCov{}, 2}, {GaussianNoise{1}}, 9, 3);
  Dataset shifted = d;
  shifted.X.array() += 5.0;
  shifted.y.array() += 2.0;
  const Dataset c = center_columns(shifted);
  EXPECT_LT(c.X.colwise().mean().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(std::abs(c.y.mean()), 1e-12);
}

TEST(Seeds, DerivedStreamsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(5, 3), derive_seed(5, 3));
}
