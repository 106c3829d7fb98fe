#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "housedict/householder.hpp"
#include "support/oracles.hpp"

using namespace housedict;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

OrthogonalProduct random_product(Index n, std::size_t m, std::mt19937_64& rng) {
  std::vector<HouseholderFactor> fs;
  for (std::size_t k = 0; k < m; ++k) fs.push_back(make_factor(oracle::random_vector(n, rng)));
  return OrthogonalProduct::from_factors(fs);
}

}  // namespace

TEST(MakeFactor, NormalizesThreeFour) {
  const auto h = make_factor(vec({3, 4}));
  EXPECT_NEAR(h.u()[0], 0.6, 1e-15);
  EXPECT_NEAR(h.u()[1], 0.8, 1e-15);
}

TEST(MakeFactor, BasisVectorUnchanged) {
  const auto h = make_factor(vec({1, 0, 0}));
  EXPECT_EQ(h.u(), vec({1, 0, 0}));
}

TEST(MakeFactor, RandomVectorHasUnitNorm) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const auto h = make_factor(oracle::random_vector(50, rng) * std::pow(10.0, t % 20 - 10));
    EXPECT_NEAR(h.u().norm(), 1.0, 1e-12);
  }
}

TEST(MakeFactor, RejectsZeroVector) {
  EXPECT_THROW(make_factor(Vector::Zero(5)), std::invalid_argument);
}

TEST(MakeFactor, RejectsNonFinite) {
  EXPECT_THROW(make_factor(vec({1, std::nan("")})), std::invalid_argument);
}

TEST(MakeFactor, RejectsDimensionOne) {
  EXPECT_THROW(make_factor(vec({1})), DimensionMismatch);
}

TEST(MakeFactor, SignFlipGivesSameReflector) {
  std::mt19937_64 rng(2);
  const Vector v = oracle::random_vector(12, rng);
  EXPECT_LE((make_factor(v).dense() - make_factor(-v).dense()).norm(), 1e-15);
}

TEST(ApplyFactor, ReflectsAboutFirstAxis) {
  const auto h = make_factor(vec({1, 0, 0}));
  EXPECT_EQ(apply_factor(h, vec({1, 2, 3})), vec({-1, 2, 3}));
}

TEST(ApplyFactor, UIsEigenvectorWithMinusOne) {
  std::mt19937_64 rng(3);
  const auto h = make_factor(oracle::random_vector(20, rng));
  EXPECT_LE((apply_factor(h, h.u()) + h.u()).norm(), 1e-14);
}

TEST(ApplyFactor, MatchesDenseOracle) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const Vector u = oracle::random_unit(32, rng);
    const Vector x = oracle::random_vector(32, rng);
    const auto h = make_factor(u);
    EXPECT_LE((apply_factor(h, x) - oracle::reflector(u) * x).norm(), 1e-12);
  }
}

TEST(ApplyFactor, DimensionMismatchThrows) {
  const auto h = make_factor(vec({1, 1, 1}));
  EXPECT_THROW(apply_factor(h, vec({1, 2})), DimensionMismatch);
  EXPECT_THROW(apply_factor_matrix(h, Matrix::Ones(4, 2)), DimensionMismatch);
}

TEST(ApplyFactorMatrix, IdentityColumnsGiveDenseH) {
  std::mt19937_64 rng(5);
  const Vector u = oracle::random_unit(8, rng);
  const auto h = make_factor(u);
  EXPECT_LE((apply_factor_matrix(h, Matrix::Identity(8, 8)) - oracle::reflector(u)).norm(), 1e-14);
}

TEST(ApplyFactorMatrix, TwiceIsIdentity) {
  std::mt19937_64 rng(6);
  const auto h = make_factor(oracle::random_vector(40, rng));
  const Matrix y = oracle::random_matrix(40, 7, rng);
  EXPECT_LE((apply_factor_matrix(h, apply_factor_matrix(h, y)) - y).norm(), 1e-12 * y.norm());
}

TEST(ApplyFactorMatrix, RuntimeScalesWithRows) {
  std::mt19937_64 rng(7);
  auto best_time = [&](Index n) {
    const auto h = make_factor(oracle::random_vector(n, rng));
    Matrix y = oracle::random_matrix(n, 16, rng);
    double best = 1e30;
    for (int rep = 0; rep < 15; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      for (int k = 0; k < 200; ++k) h.apply_in_place(y);
      const auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
  };
  best_time(500);
  const double ratio = best_time(1000) / best_time(500);
  EXPECT_GE(ratio, 1.0);
  EXPECT_LE(ratio, 3.0);
}

TEST(ApplyProduct, EmptyProductIsIdentity) {
  std::mt19937_64 rng(8);
  const Matrix y = oracle::random_matrix(6, 3, rng);
  const OrthogonalProduct v(6);
  EXPECT_EQ(apply_product(v, y), y);
  EXPECT_EQ(apply_product(v, y, Transpose::yes), y);
}

TEST(ApplyProduct, SingleFactorMatchesApplyFactorMatrix) {
  std::mt19937_64 rng(9);
  const auto h = make_factor(oracle::random_vector(10, rng));
  const Matrix y = oracle::random_matrix(10, 4, rng);
  EXPECT_LE((apply_product(OrthogonalProduct::from_factors({h}), y) - apply_factor_matrix(h, y)).norm(), 1e-15);
}

TEST(ApplyProduct, TransposeInvertsProduct) {
  std::mt19937_64 rng(10);
  const auto v = random_product(16, 3, rng);
  const Matrix y = oracle::random_matrix(16, 5, rng);
  EXPECT_LE((apply_product(v, apply_product(v, y, Transpose::yes)) - y).norm(), 1e-10);
  EXPECT_LE((apply_product(v, apply_product(v, y), Transpose::yes) - y).norm(), 1e-10);
}

TEST(ApplyProduct, OrderMatchesDenseProduct) {
  std::mt19937_64 rng(11);
  const Vector u1 = oracle::random_unit(9, rng);
  const Vector u2 = oracle::random_unit(9, rng);
  const Vector u3 = oracle::random_unit(9, rng);
  const auto v = OrthogonalProduct::from_factors({make_factor(u1), make_factor(u2), make_factor(u3)});
  const Matrix dense = oracle::reflector(u1) * oracle::reflector(u2) * oracle::reflector(u3);
  const Matrix y = oracle::random_matrix(9, 4, rng);
  EXPECT_LE((apply_product(v, y) - dense * y).norm(), 1e-12);
  EXPECT_LE((apply_product(v, y, Transpose::yes) - dense.transpose() * y).norm(), 1e-12);
}

TEST(ApplyProduct, IdentitySlotsAreSkipped) {
  std::mt19937_64 rng(12);
  const Vector u = oracle::random_unit(7, rng);
  const OrthogonalProduct v(7, {std::nullopt, make_factor(u), std::nullopt});
  EXPECT_TRUE(v.is_identity(0));
  EXPECT_FALSE(v.is_identity(1));
  EXPECT_LE((to_dense(v) - oracle::reflector(u)).norm(), 1e-14);
}

TEST(ApplyProduct, DimensionMismatchThrows) {
  std::mt19937_64 rng(13);
  const auto v = random_product(5, 2, rng);
  EXPECT_THROW(apply_product(v, Matrix::Ones(4, 2)), DimensionMismatch);
  EXPECT_THROW(OrthogonalProduct(5, {make_factor(vec({1, 2, 3}))}), DimensionMismatch);
}

TEST(ToDense, EmptyProductIsIdentity) {
  EXPECT_EQ(to_dense(OrthogonalProduct(4)), Matrix::Identity(4, 4));
}

TEST(ToDense, SecondBasisVector) {
  const Matrix d = to_dense(OrthogonalProduct::from_factors({make_factor(vec({0, 1, 0}))}));
  EXPECT_EQ(d, Eigen::Vector3d(1, -1, 1).asDiagonal().toDenseMatrix());
}

TEST(ToDense, TwoFactorsMatchDenseProduct) {
  std::mt19937_64 rng(14);
  const Vector u1 = oracle::random_unit(10, rng);
  const Vector u2 = oracle::random_unit(10, rng);
  const auto v = OrthogonalProduct::from_factors({make_factor(u1), make_factor(u2)});
  EXPECT_LE((to_dense(v) - oracle::reflector(u1) * oracle::reflector(u2)).norm(), 1e-13);
}

TEST(ToDense, IsOrthogonal) {
  std::mt19937_64 rng(15);
  const Matrix d = to_dense(random_product(30, 6, rng));
  EXPECT_LE((d.transpose() * d - Matrix::Identity(30, 30)).norm(), 1e-10);
}

TEST(Properties, InvolutionIsometryAndDenseAgreement) {
  std::mt19937_64 rng(16);
  std::uniform_int_distribution<Index> dim(2, 64);
  std::uniform_int_distribution<std::size_t> count(0, 5);
  for (int t = 0; t < 300; ++t) {
    const Index n = dim(rng);
    const Vector x = oracle::random_vector(n, rng);
    const auto h = make_factor(oracle::random_vector(n, rng));
    EXPECT_LE((apply_factor(h, apply_factor(h, x)) - x).norm(), 1e-12 * x.norm());

    std::vector<OrthogonalProduct::Slot> slots;
    Matrix dense = Matrix::Identity(n, n);
    for (std::size_t k = count(rng); k > 0; --k) {
      const Vector u = oracle::random_unit(n, rng);
      slots.emplace_back(make_factor(u));
      dense = dense * oracle::reflector(u);
    }
    const OrthogonalProduct v(n, std::move(slots));
    const Matrix y = oracle::random_matrix(n, 3, rng);
    const Matrix vy = apply_product(v, y);
    EXPECT_NEAR(vy.norm(), y.norm(), 1e-10 * y.norm());
    EXPECT_LE((vy - dense * y).norm(), 1e-10);
    EXPECT_LE((apply_product(v, y, Transpose::yes) - dense.transpose() * y).norm(), 1e-10);
  }
}

TEST(ReflectorRewrite, BasisVectorInTwoDimensions) {
  const auto t = lemma1_construct(make_factor(vec({1, 0})));
  EXPECT_NEAR(std::abs(t.u1.u()[1]), 1.0, 1e-15);
  EXPECT_NEAR(t.u1.u()[0], 0.0, 1e-15);
  const double s = t.u1.u()[1];
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(t.u2.u()[0], r, 1e-15);
  EXPECT_NEAR(t.u2.u()[1], s * r, 1e-15);
  EXPECT_NEAR(t.u3.u()[0], r, 1e-15);
  EXPECT_NEAR(t.u3.u()[1], -s * r, 1e-15);
}

TEST(ReflectorRewrite, ProductIdentityAndOrthogonality) {
  std::mt19937_64 rng(17);
  for (Index n : {2, 3, 20, 64}) {
    for (int t = 0; t < 20; ++t) {
      const auto h = make_factor(oracle::random_vector(n, rng));
      const auto w = lemma1_construct(h);
      EXPECT_NEAR(w.u1.u().dot(h.u()), 0.0, 1e-12);
      EXPECT_NEAR(w.u2.u().dot(w.u3.u()), 0.0, 1e-12);
      EXPECT_NEAR(w.u2.u().norm(), 1.0, 1e-12);
      EXPECT_NEAR(w.u3.u().norm(), 1.0, 1e-12);
      const Matrix lhs = h.dense() * w.u1.dense();
      const Matrix rhs = w.u2.dense() * w.u3.dense();
      EXPECT_LE((lhs - rhs).norm(), 1e-10);
      EXPECT_GT((w.u1.dense() - h.dense()).norm(), 1.0);
    }
  }
}
