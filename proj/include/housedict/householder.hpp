#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "housedict/errors.hpp"

namespace housedict {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
/// Column-major; one column per sample.
using Matrix = Eigen::MatrixXd;

namespace detail {

inline void require_dim(Index expected, Index got, const char* what) {
  if (expected != got) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " +
                            std::to_string(expected) + ", got " +
                            std::to_string(got));
  }
}

}  // namespace detail

/// Householder reflector H = I - 2 u u^T held as its unit vector u.
///
/// The dense n x n form is never stored. Applying H to a vector costs one dot
/// product and one axpy; applying it to an n x p block costs Theta(np).
class HouseholderFactor {
 public:
  /// Normalizes v. Throws std::invalid_argument on a zero (or non-finite)
  /// vector and DimensionMismatch when n < 2.
  static HouseholderFactor from_vector(const Vector& v) {
    if (v.size() < 2) {
      throw DimensionMismatch("Householder vector needs n >= 2, got " +
                              std::to_string(v.size()));
    }
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw std::invalid_argument(
          "Householder vector must be non-zero and finite");
    }
    Vector u = v / norm;
    // Second pass pulls |‖u‖ - 1| down to round-off when v was badly scaled.
    u /= u.norm();
    return HouseholderFactor(std::move(u));
  }

  const Vector& u() const { return u_; }
  Index dim() const { return u_.size(); }

  Vector apply(const Vector& x) const {
    detail::require_dim(dim(), x.size(), "apply_factor");
    return x - (2.0 * u_.dot(x)) * u_;
  }

  /// y <- H y, column by column.
  void apply_in_place(Eigen::Ref<Matrix> y) const {
    detail::require_dim(dim(), y.rows(), "apply_factor_matrix");
    if (y.cols() == 0) return;
    const RowVector w = u_.transpose() * y;
    y.noalias() -= (2.0 * u_) * w;
  }

  Matrix apply(const Matrix& y) const {
    Matrix out = y;
    apply_in_place(out);
    return out;
  }

  Matrix dense() const {
    Matrix h = Matrix::Identity(dim(), dim());
    h.noalias() -= 2.0 * u_ * u_.transpose();
    return h;
  }

 private:
  explicit HouseholderFactor(Vector u) : u_(std::move(u)) {}

  Vector u_;
};

inline HouseholderFactor make_factor(const Vector& v) {
  return HouseholderFactor::from_vector(v);
}

inline Vector apply_factor(const HouseholderFactor& h, const Vector& x) {
  return h.apply(x);
}

inline Matrix apply_factor_matrix(const HouseholderFactor& h, const Matrix& y) {
  return h.apply(y);
}

enum class Transpose : bool { no = false, yes = true };

/// V = H_1 H_2 ... H_m, stored as an ordered list of slots.
///
/// A slot is either a Householder factor or the identity. The identity slot
/// exists because the sequential estimator starts from H_i = I, which no unit
/// vector can represent.
class OrthogonalProduct {
 public:
  using Slot = std::optional<HouseholderFactor>;

  explicit OrthogonalProduct(Index n) : n_(n) {
    if (n < 2) {
      throw DimensionMismatch("orthogonal product needs n >= 2, got " +
                              std::to_string(n));
    }
  }

  OrthogonalProduct(Index n, std::vector<Slot> slots)
      : OrthogonalProduct(n) {
    for (const auto& s : slots) {
      if (s) detail::require_dim(n_, s->dim(), "OrthogonalProduct factor");
    }
    slots_ = std::move(slots);
  }

  static OrthogonalProduct identity(Index n, std::size_t m) {
    return OrthogonalProduct(n, std::vector<Slot>(m));
  }

  static OrthogonalProduct from_factors(
      const std::vector<HouseholderFactor>& factors) {
    if (factors.empty()) {
      throw std::invalid_argument(
          "from_factors needs at least one factor to fix n");
    }
    return OrthogonalProduct(factors.front().dim(),
                             std::vector<Slot>(factors.begin(), factors.end()));
  }

  Index dim() const { return n_; }
  std::size_t size() const { return slots_.size(); }
  bool empty() const { return slots_.empty(); }
  const Slot& operator[](std::size_t i) const { return slots_[i]; }
  bool is_identity(std::size_t i) const { return !slots_[i].has_value(); }
  const std::vector<Slot>& slots() const { return slots_; }

  /// y <- V y (Transpose::no) or y <- V^T y (Transpose::yes).
  void apply_in_place(Eigen::Ref<Matrix> y, Transpose t = Transpose::no) const {
    detail::require_dim(n_, y.rows(), "apply_product");
    if (t == Transpose::no) {
      for (auto it = slots_.rbegin(); it != slots_.rend(); ++it) {
        if (*it) (*it)->apply_in_place(y);
      }
    } else {
      for (const auto& s : slots_) {
        if (s) s->apply_in_place(y);
      }
    }
  }

  Vector apply(const Vector& x, Transpose t = Transpose::no) const {
    detail::require_dim(n_, x.size(), "apply_product");
    Vector out = x;
    apply_in_place(out, t);
    return out;
  }

 private:
  Index n_;
  std::vector<Slot> slots_;
};

/// H_1(H_2(...(H_m Y))) or, transposed, H_m(...(H_1 Y)).
inline Matrix apply_product(const OrthogonalProduct& v, const Matrix& y,
                            Transpose t = Transpose::no) {
  Matrix out = y;
  v.apply_in_place(out, t);
  return out;
}

inline Matrix to_dense(const OrthogonalProduct& v) {
  Matrix out = Matrix::Identity(v.dim(), v.dim());
  v.apply_in_place(out);
  return out;
}

/// Witness that Householder factorizations are not unique: H(u) H(u1) equals
/// H(u2) H(u3) with u1 orthogonal to u.
struct ReflectorTriple {
  HouseholderFactor u1;
  HouseholderFactor u2;
  HouseholderFactor u3;
};

inline ReflectorTriple lemma1_construct(const HouseholderFactor& h) {
  const Vector& u = h.u();
  Index j = 0;
  u.cwiseAbs().minCoeff(&j);
  // Some |u_j| <= 1/sqrt(n), so e_j - u_j u has norm >= sqrt(1 - 1/n).
  Vector w = -u[j] * u;
  w[j] += 1.0;
  auto u1 = HouseholderFactor::from_vector(w);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  auto u2 = HouseholderFactor::from_vector((u + u1.u()) * inv_sqrt2);
  auto u3 = HouseholderFactor::from_vector((u - u1.u()) * inv_sqrt2);
  return {std::move(u1), std::move(u2), std::move(u3)};
}

}  // namespace housedict
