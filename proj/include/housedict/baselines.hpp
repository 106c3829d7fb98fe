#pragma once

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <string>

#include "housedict/errors.hpp"
#include "housedict/householder.hpp"
#include "housedict/synthesis.hpp"

namespace housedict {

struct PolarResult {
  Matrix orthogonal_factor;
  int iterations = 0;
  /// ||Q_k - Q_{k-1}||_F at termination.
  double residual = 0.0;
};

struct PolarOptions {
  double tolerance = 1e-10;
  int max_iterations = 100;
  /// LU reciprocal-condition estimate below which the iterate is singular.
  double min_rcond = 1e-12;
  /// Frobenius-norm scaling is dropped once the step falls below this.
  double unscaled_below = 1e-2;
};

/// Orthogonal polar factor of a square nonsingular A by Newton iteration
/// Q_{k+1} = (g Q_k + (g Q_k)^{-T}) / 2 from Q_0 = A / ||A||_F, with the
/// Frobenius scaling g = sqrt(||Q_k^{-1}||_F / ||Q_k||_F) while far from
/// convergence. Throws SingularInput on a singular iterate or when the
/// iteration limit is reached.
inline PolarResult polar_orthogonal_factor(const Matrix& a,
                                           const PolarOptions& opts = {}) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionMismatch("polar decomposition needs a non-empty square matrix");
  }
  const double norm = a.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw SingularInput("polar decomposition of a zero or non-finite matrix");
  }

  Matrix q = a / norm;
  double step = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opts.max_iterations; ++it) {
    Eigen::PartialPivLU<Matrix> lu(q);
    const double rcond = lu.rcond();
    if (!(rcond >= opts.min_rcond)) {
      throw SingularInput("matrix is singular to working precision (rcond = " +
                          std::to_string(rcond) + ")");
    }
    const Matrix inv = lu.inverse();
    double g = 1.0;
    if (step > opts.unscaled_below) {
      g = std::sqrt(inv.norm() / q.norm());
    }
    Matrix next = 0.5 * (g * q + inv.transpose() / g);
    step = (next - q).norm();
    q = std::move(next);
    if (step <= opts.tolerance) return {std::move(q), it, step};
  }
  throw SingularInput("polar iteration did not converge in " +
                      std::to_string(opts.max_iterations) +
                      " iterations (last step " + std::to_string(step) + ")");
}

/// Best-case Procrustes estimate of V from Y = V X with X known: the
/// orthogonal polar factor of Y X^T. When p < n the product has rank at most
/// p and SingularInput is raised without factorizing.
inline Matrix procrustes_known_x(const Matrix& y, const Matrix& x) {
  if (y.rows() != x.rows() || y.cols() != x.cols()) {
    throw DimensionMismatch("Y and X must have the same shape");
  }
  if (y.cols() < y.rows()) {
    throw SingularInput("Y X^T has rank at most p = " +
                        std::to_string(y.cols()) + " < n = " +
                        std::to_string(y.rows()));
  }
  const Matrix cross = y * x.transpose();
  return polar_orthogonal_factor(cross).orthogonal_factor;
}

inline Matrix procrustes_known_x(const Matrix& y, const SparseMatrix& x) {
  return procrustes_known_x(y, Matrix(x));
}

}  // namespace housedict
