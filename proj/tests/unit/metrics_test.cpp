#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "housedict/metrics.hpp"
#include "housedict/synthesis.hpp"
#include "support/oracles.hpp"

using namespace housedict;

TEST(Linf, IdenticalAndNegated) {
  std::mt19937_64 rng(1);
  const Vector u = oracle::random_unit(9, rng);
  EXPECT_EQ(linf_error_up_to_sign(u, u), 0.0);
  EXPECT_EQ(linf_error_up_to_sign(u, -u), 0.0);
}

TEST(Linf, WorkedExample) {
  EXPECT_NEAR(linf_error_up_to_sign(Eigen::Vector2d(1, 0), Eigen::Vector2d(0.8, 0.6)), 0.6, 1e-15);
}

TEST(Linf, SignInvariantPseudometric) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const Vector a = oracle::random_unit(7, rng);
    const Vector b = oracle::random_unit(7, rng);
    const Vector c = oracle::random_unit(7, rng);
    const double ab = linf_error_up_to_sign(a, b);
    EXPECT_EQ(ab, linf_error_up_to_sign(b, a));
    EXPECT_EQ(ab, linf_error_up_to_sign(-a, b));
    EXPECT_EQ(ab, linf_error_up_to_sign(a, -b));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(linf_error_up_to_sign(a, c), ab + linf_error_up_to_sign(b, c) + 1e-15);
  }
}

TEST(Linf, DimensionMismatchThrows) {
  EXPECT_THROW(linf_error_up_to_sign(Vector::Ones(3), Vector::Ones(4)), DimensionMismatch);
}

TEST(FrobeniusV, SameFactorsGiveZero) {
  std::mt19937_64 rng(3);
  const auto v = OrthogonalProduct::from_factors({make_factor(oracle::random_vector(20, rng)),
                                                  make_factor(oracle::random_vector(20, rng))});
  EXPECT_EQ(frobenius_error_v(v, v), 0.0);
}

TEST(FrobeniusV, DependsOnlyOnProduct) {
  std::mt19937_64 rng(4);
  for (Index n : {2, 8, 64}) {
    const auto h = make_factor(oracle::random_vector(n, rng));
    const auto w = lemma1_construct(h);
    const auto lhs = OrthogonalProduct::from_factors({h, w.u1});
    const auto rhs = OrthogonalProduct::from_factors({w.u2, w.u3});
    EXPECT_LE(frobenius_error_v(lhs, rhs), 1e-10);
    EXPECT_LE(frobenius_error_v_matrix_free(lhs, rhs), 1e-10);
  }
}

TEST(FrobeniusV, ReflectorAgainstIdentityIsTwo) {
  for (Index n : {2, 10, 300}) {
    Vector e1 = Vector::Zero(n);
    e1[0] = 1.0;
    const auto v = OrthogonalProduct::from_factors({make_factor(e1)});
    EXPECT_NEAR(frobenius_error_v(v, OrthogonalProduct(n)), 2.0, 1e-14);
    EXPECT_NEAR(frobenius_error_v_matrix_free(v, OrthogonalProduct::identity(n, 3)), 2.0, 1e-14);
  }
}

TEST(FrobeniusV, MatrixFreeAgreesWithDense) {
  std::mt19937_64 rng(5);
  for (Index n : {5, 64, 130, 256}) {
    std::vector<HouseholderFactor> a;
    std::vector<HouseholderFactor> b;
    for (int k = 0; k < 4; ++k) a.push_back(make_factor(oracle::random_vector(n, rng)));
    for (int k = 0; k < 3; ++k) b.push_back(make_factor(oracle::random_vector(n, rng)));
    const auto va = OrthogonalProduct::from_factors(a);
    const auto vb = OrthogonalProduct::from_factors(b);
    const double dense = (to_dense(va) - to_dense(vb)).norm();
    EXPECT_NEAR(frobenius_error_v(va, vb), dense, 1e-10);
    EXPECT_NEAR(frobenius_error_v_matrix_free(va, vb, 17), dense, 1e-8);
    EXPECT_NEAR(frobenius_error_v(va, to_dense(vb)), dense, 1e-10);
  }
}

TEST(FrobeniusV, MatrixFreeResolvesTinyErrors) {
  // The difference is accumulated directly, so errors far below sqrt(n eps)
  // survive instead of cancelling in 2n - 2 trace.
  std::mt19937_64 rng(6);
  const Index n = 400;
  const Vector u = oracle::random_unit(n, rng);
  const Vector du = 1e-9 * oracle::random_unit(n, rng);
  const auto a = OrthogonalProduct::from_factors({make_factor(u)});
  const auto b = OrthogonalProduct::from_factors({make_factor(u + du)});
  const double dense = (oracle::reflector(u) - oracle::reflector((u + du).normalized())).norm();
  EXPECT_NEAR(frobenius_error_v_matrix_free(a, b), dense, 1e-6 * dense);
}

TEST(FrobeniusV, LargeDimensionUsesMatrixFreePath) {
  std::mt19937_64 rng(7);
  const Index n = 2500;
  Vector e = Vector::Zero(n);
  e[5] = 1.0;
  const auto v = OrthogonalProduct::from_factors({make_factor(e)});
  EXPECT_NEAR(frobenius_error_v(v, OrthogonalProduct(n)), 2.0, 1e-12);
}

TEST(FrobeniusV, DimensionMismatchThrows) {
  EXPECT_THROW(frobenius_error_v(OrthogonalProduct(3), OrthogonalProduct(4)), DimensionMismatch);
  EXPECT_THROW(frobenius_error_v(OrthogonalProduct(3), Matrix::Identity(4, 4)), DimensionMismatch);
}

TEST(XError, ExactIsZero) {
  const SparseMatrix x = sample_sparse_matrix(20, 10, SparseModel(0.3), RngSpec{8, 0});
  EXPECT_EQ(x_error_per_entry(x, x), 0.0);
}

TEST(XError, ZeroEstimateOfConstantMatrix) {
  const double tm = 0.3 * 1.5;
  EXPECT_NEAR(x_error_per_entry(Matrix::Constant(12, 7, tm), Matrix::Zero(12, 7)), tm, 1e-15);
}

TEST(XError, KnownPerturbationNorm) {
  std::mt19937_64 rng(9);
  const Matrix x = oracle::random_matrix(30, 8, rng);
  Matrix d = oracle::random_matrix(30, 8, rng);
  d *= 2.5 / d.norm();
  EXPECT_NEAR(x_error_per_entry(x, x + d), 2.5 / std::sqrt(240.0), 1e-14);
  EXPECT_NEAR(x_error_per_entry(SparseMatrix(x.sparseView()), SparseMatrix((x + d).sparseView())),
              2.5 / std::sqrt(240.0), 1e-14);
}

TEST(XError, ShapeMismatchThrows) {
  EXPECT_THROW(x_error_per_entry(Matrix::Zero(2, 3), Matrix::Zero(3, 2)), DimensionMismatch);
}

TEST(SupportF1, CountsPatternOnly) {
  Matrix a(2, 3);
  a << 1, 0, 2,
       0, 3, 0;
  Matrix b(2, 3);
  b << 5, 0, 0,
       0, 1, 7;
  // truth 3, predicted 3, hits 2.
  EXPECT_NEAR(support_f1(a.sparseView(), b.sparseView()), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(support_f1(a.sparseView(), a.sparseView()), 1.0);
  EXPECT_EQ(support_f1(SparseMatrix(2, 3), SparseMatrix(2, 3)), 1.0);
  EXPECT_EQ(support_f1(a.sparseView(), SparseMatrix(2, 3)), 0.0);
}

TEST(SupportF1, IgnoresExplicitZeros) {
  SparseMatrix a(3, 1);
  a.insert(0, 0) = 1.0;
  a.insert(1, 0) = 0.0;
  SparseMatrix b(3, 1);
  b.insert(0, 0) = 4.0;
  EXPECT_EQ(support_f1(a, b), 1.0);
}

TEST(Snr, EqualPowerIsZeroDb) {
  std::mt19937_64 rng(10);
  const Matrix s = oracle::random_matrix(10, 10, rng);
  EXPECT_NEAR(measured_snr_db(s, -s), 0.0, 1e-12);
}

TEST(Snr, TenthAmplitudeIsTwentyDb) {
  std::mt19937_64 rng(11);
  const Matrix s = oracle::random_matrix(10, 10, rng);
  const Matrix n = oracle::random_matrix(10, 10, rng);
  EXPECT_NEAR(measured_snr_db(s, n * (s.norm() / n.norm()) / 10.0), 20.0, 1e-10);
}

TEST(Snr, ZeroNoiseIsInfinite) {
  EXPECT_EQ(measured_snr_db(Matrix::Ones(3, 3), Matrix::Zero(3, 3)), std::numeric_limits<double>::infinity());
}

TEST(Snr, RegeneratedInstanceRoundTrip) {
  const auto inst = make_instance(300, 40, 2, SparseModel(0.3), 10.0, {}, RngSpec{12, 0});
  const Matrix vx = inst.signal();
  EXPECT_NEAR(measured_snr_db(vx, regenerate_noise(300, 40, inst.noise_sigma, inst.rng)), 10.0, 1.0);
}
