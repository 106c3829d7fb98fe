#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "housedict/householder.hpp"
#include "housedict/synthesis.hpp"

namespace housedict {

/// Error measures reported per trial. Every field is >= 0 and support_f1 is
/// in [0, 1].
struct ErrorReport {
  double linf_u = 0.0;
  double frob_v = 0.0;
  double frob_x_per_entry = 0.0;
  double support_f1 = 0.0;
  std::optional<double> snr_measured_db;
};

/// min(||u - u_hat||_inf, ||u + u_hat||_inf).
inline double linf_error_up_to_sign(const Vector& u, const Vector& u_hat) {
  detail::require_dim(u.size(), u_hat.size(), "linf_error_up_to_sign");
  return std::min((u - u_hat).lpNorm<Eigen::Infinity>(),
                  (u + u_hat).lpNorm<Eigen::Infinity>());
}

/// Above this n the V error is accumulated block by block instead of
/// materializing both dense products.
inline constexpr Index kDenseFrobeniusLimit = 2000;

/// ||V - V_hat||_F without forming either matrix: both products are applied to
/// blocks of identity columns and the differences accumulated.
inline double frobenius_error_v_matrix_free(const OrthogonalProduct& v,
                                            const OrthogonalProduct& v_hat,
                                            Index block = 128) {
  detail::require_dim(v.dim(), v_hat.dim(), "frobenius_error_v");
  const Index n = v.dim();
  double total = 0.0;
  for (Index start = 0; start < n; start += block) {
    const Index width = std::min(block, n - start);
    Matrix probe = Matrix::Zero(n, width);
    for (Index j = 0; j < width; ++j) probe(start + j, j) = 1.0;
    Matrix lhs = probe;
    v.apply_in_place(lhs);
    v_hat.apply_in_place(probe);
    total += (lhs - probe).squaredNorm();
  }
  return std::sqrt(total);
}

inline double frobenius_error_v(const OrthogonalProduct& v,
                                const OrthogonalProduct& v_hat) {
  detail::require_dim(v.dim(), v_hat.dim(), "frobenius_error_v");
  if (v.dim() > kDenseFrobeniusLimit) {
    return frobenius_error_v_matrix_free(v, v_hat);
  }
  return (to_dense(v) - to_dense(v_hat)).norm();
}

inline double frobenius_error_v(const OrthogonalProduct& v,
                                const Matrix& v_hat) {
  detail::require_dim(v.dim(), v_hat.rows(), "frobenius_error_v");
  detail::require_dim(v.dim(), v_hat.cols(), "frobenius_error_v");
  return (to_dense(v) - v_hat).norm();
}

/// Root-mean-square entry error ||X - X_hat||_F / sqrt(n p).
inline double x_error_per_entry(const Matrix& x, const Matrix& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols()) {
    throw DimensionMismatch("x_error_per_entry: shape mismatch");
  }
  if (x.size() == 0) return 0.0;
  return (x - x_hat).norm() / std::sqrt(static_cast<double>(x.size()));
}

inline double x_error_per_entry(const SparseMatrix& x,
                                const SparseMatrix& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols()) {
    throw DimensionMismatch("x_error_per_entry: shape mismatch");
  }
  if (x.size() == 0) return 0.0;
  return SparseMatrix(x - x_hat).norm() /
         std::sqrt(static_cast<double>(x.size()));
}

/// F1 score of the non-zero pattern of x_hat against that of x. Two empty
/// supports score 1.
inline double support_f1(const SparseMatrix& x, const SparseMatrix& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols()) {
    throw DimensionMismatch("support_f1: shape mismatch");
  }
  long truth = 0;
  long predicted = 0;
  long hits = 0;
  for (Index j = 0; j < x.outerSize(); ++j) {
    SparseMatrix::InnerIterator a(x, j);
    SparseMatrix::InnerIterator b(x_hat, j);
    // Explicit zeros are not support.
    auto skip_zero = [](SparseMatrix::InnerIterator& it) {
      while (it && it.value() == 0.0) ++it;
    };
    skip_zero(a);
    skip_zero(b);
    while (a || b) {
      if (b && (!a || b.index() < a.index())) {
        ++predicted;
        ++b;
      } else if (a && (!b || a.index() < b.index())) {
        ++truth;
        ++a;
      } else {
        ++truth;
        ++predicted;
        ++hits;
        ++a;
        ++b;
      }
      skip_zero(a);
      skip_zero(b);
    }
  }
  if (truth + predicted == 0) return 1.0;
  return 2.0 * static_cast<double>(hits) / static_cast<double>(truth + predicted);
}

/// 10 log10(||signal||_F^2 / ||noise||_F^2); +infinity for zero noise.
inline double measured_snr_db(const Matrix& signal, const Matrix& noise) {
  if (signal.rows() != noise.rows() || signal.cols() != noise.cols()) {
    throw DimensionMismatch("measured_snr_db: shape mismatch");
  }
  const double noise_power = noise.squaredNorm();
  if (noise_power == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal.squaredNorm() / noise_power);
}

}  // namespace housedict
