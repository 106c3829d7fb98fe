#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "housedict/errors.hpp"
#include "housedict/householder.hpp"
#include "housedict/synthesis.hpp"

namespace housedict {

namespace detail {

/// Neumaier-compensated sum of every row, accumulated column by column so
/// the inner loop walks contiguous memory.
inline Vector compensated_row_sums(const Matrix& y) {
  const Index n = y.rows();
  Vector sum = Vector::Zero(n);
  Vector comp = Vector::Zero(n);
  for (Index j = 0; j < y.cols(); ++j) {
    const double* col = y.col(j).data();
    for (Index i = 0; i < n; ++i) {
      const double x = col[i];
      const double t = sum[i] + x;
      comp[i] += std::abs(sum[i]) >= std::abs(x) ? (sum[i] - t) + x
                                                 : (x - t) + sum[i];
      sum[i] = t;
    }
  }
  return sum + comp;
}

inline double compensated_sum(const Vector& v) {
  double sum = 0.0;
  double comp = 0.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double t = sum + v[i];
    comp += std::abs(sum) >= std::abs(v[i]) ? (sum - t) + v[i]
                                            : (v[i] - t) + sum;
    sum = t;
  }
  return sum + comp;
}

inline void require_model(double theta, double mu, Index p) {
  if (!(theta * mu > 0.0)) {
    throw std::invalid_argument("theta * mu must be positive");
  }
  if (p < 1) throw DimensionMismatch("Y needs at least one column");
}

}  // namespace detail

/// First-moment statistics of Y under the Bernoulli-Uniform model.
struct MomentEstimate {
  /// sqrt(max(0, (n - S/(p theta mu)) / 2)) with S the sum of all entries.
  double c_hat = 0.0;
  /// The radicand was negative and got clamped to zero.
  bool c_clamped = false;
  /// k_i = (1 - sum_j Y_ij / (p theta mu)) / 2, which estimates u_i c.
  Vector k;
  Vector y_row_means;
};

inline MomentEstimate compute_moments(const Matrix& y, double theta,
                                      double mu) {
  detail::require_model(theta, mu, y.cols());
  const double p = static_cast<double>(y.cols());
  const double n = static_cast<double>(y.rows());
  const double scale = p * theta * mu;

  const Vector row_sums = detail::compensated_row_sums(y);
  MomentEstimate out;
  out.y_row_means = row_sums / p;
  out.k = (Vector::Ones(y.rows()) - row_sums / scale) / 2.0;

  const double radicand = (n - detail::compensated_sum(row_sums) / scale) / 2.0;
  out.c_clamped = radicand < 0.0;
  out.c_hat = std::sqrt(std::max(0.0, radicand));
  return out;
}

/// Estimate of c = sum(u) for Y = H X, clamped at zero.
inline double estimate_c(const Matrix& y, double theta, double mu) {
  return compute_moments(y, theta, mu).c_hat;
}

struct EstimatorOptions {
  /// Hard threshold for the recovered codes.
  double zeta = 0.5;
  /// Ill-conditioning floor on c_hat and on sqrt|sum_m k_m s_m|.
  double epsilon = 1e-8;
  bool recover_codes = true;
};

struct RecoveryDiagnostics {
  /// c_hat for the c-based path, sum_m k_m s_m for the k-based paths.
  double normalizer = 0.0;
  double zeta = 0.0;
  bool c_clamped = false;
  /// k was negated to make sum_m k_m s_m positive.
  bool sign_flipped = false;
};

struct RecoveryResult {
  HouseholderFactor u_hat;
  std::optional<SparseMatrix> X_hat;
  RecoveryDiagnostics diagnostics;
};

/// Entrywise x * 1(|x| >= zeta).
inline SparseMatrix hard_threshold(const Matrix& x, double zeta) {
  if (!(zeta >= 0.0)) throw std::invalid_argument("zeta must be >= 0");
  // Branch-free: the support is random, so a data-dependent branch would
  // mispredict on a large share of entries. Every entry is written to the
  // next slot and the cursor only advances when the entry is kept.
  using StorageIndex = SparseMatrix::StorageIndex;
  Index nnz = 0;
  for (Index k = 0; k < x.size(); ++k) nnz += std::abs(x.data()[k]) >= zeta;
  std::vector<StorageIndex> outer(static_cast<std::size_t>(x.cols()) + 1);
  std::vector<StorageIndex> inner(static_cast<std::size_t>(nnz) + 1);
  std::vector<double> values(static_cast<std::size_t>(nnz) + 1);
  std::size_t cursor = 0;
  for (Index j = 0; j < x.cols(); ++j) {
    outer[static_cast<std::size_t>(j)] = static_cast<StorageIndex>(cursor);
    const double* col = x.col(j).data();
    for (Index i = 0; i < x.rows(); ++i) {
      inner[cursor] = static_cast<StorageIndex>(i);
      values[cursor] = col[i];
      cursor += std::abs(col[i]) >= zeta;
    }
  }
  outer.back() = static_cast<StorageIndex>(cursor);
  return Eigen::Map<const SparseMatrix>(x.rows(), x.cols(), nnz, outer.data(),
                                        inner.data(), values.data());
}

/// HT_zeta(V_hat^T Y) through the structured applies, O(nmp).
inline SparseMatrix recover_x(const Matrix& y, const OrthogonalProduct& v_hat,
                              double zeta) {
  Matrix codes = y;
  v_hat.apply_in_place(codes, Transpose::yes);
  return hard_threshold(codes, zeta);
}

/// Single-reflector recovery for Y = H X through c_hat:
/// u_i = (1 - sum_j Y_ij / (p theta mu)) / (2 c_hat), then renormalized.
inline RecoveryResult estimate_u_hx(const Matrix& y, double theta, double mu,
                                    const EstimatorOptions& opts = {}) {
  const MomentEstimate moments = compute_moments(y, theta, mu);
  if (!(moments.c_hat > opts.epsilon)) {
    throw IllConditioned(
        "c too small: c_hat = " + std::to_string(moments.c_hat) +
        "; recovery needs sum(u) to grow with n (c = Omega(n^alpha), "
        "alpha > 1/4)");
  }
  // k_i = (1 - ...)/2, so (1 - ...)/(2 c_hat) = k_i / c_hat.
  auto u_hat = HouseholderFactor::from_vector(moments.k / moments.c_hat);

  RecoveryResult out{std::move(u_hat), std::nullopt,
                     {moments.c_hat, opts.zeta, moments.c_clamped, false}};
  if (opts.recover_codes) {
    out.X_hat = recover_x(y, OrthogonalProduct::from_factors({out.u_hat}),
                          opts.zeta);
  }
  return out;
}

/// Applies Q^T in place; used to form (H Q)^T Y when Q is known.
using ApplyTranspose = std::function<void(Eigen::Ref<Matrix>)>;

/// Recovery for Y = H Q X given s = Q 1:
/// k_i = (s_i - sum_j Y_ij / (p theta mu)) / 2, u_i = k_i / sqrt(sum_m k_m s_m).
///
/// If sum_m k_m s_m < 0 the whole k is negated first (u and -u give the same
/// H). Codes are returned only when q_transpose is supplied.
inline RecoveryResult estimate_u_hqx(const Matrix& y, const Vector& s,
                                     double theta, double mu,
                                     const EstimatorOptions& opts = {},
                                     const ApplyTranspose& q_transpose = {}) {
  detail::require_dim(y.rows(), s.size(), "estimate_u_hqx row sums");
  detail::require_model(theta, mu, y.cols());
  const double scale = static_cast<double>(y.cols()) * theta * mu;

  Vector k = (s - detail::compensated_row_sums(y) / scale) / 2.0;
  double ks = k.dot(s);
  bool flipped = false;
  if (ks < 0.0) {
    k = -k;
    ks = -ks;
    flipped = true;
  }
  if (!(std::sqrt(ks) > opts.epsilon)) {
    throw IllConditioned("sum_m k_m s_m = " + std::to_string(ks) +
                         " is too close to zero (u^T Q 1 must be non-zero)");
  }
  auto u_hat = HouseholderFactor::from_vector(k / std::sqrt(ks));

  RecoveryResult out{std::move(u_hat), std::nullopt,
                     {ks, opts.zeta, false, flipped}};
  if (opts.recover_codes && q_transpose) {
    Matrix codes = y;
    out.u_hat.apply_in_place(codes);
    q_transpose(codes);
    out.X_hat = hard_threshold(codes, opts.zeta);
  }
  return out;
}

/// The k-based single-reflector path: estimate_u_hqx with Q = I.
inline RecoveryResult estimate_u_hx_alt(const Matrix& y, double theta,
                                        double mu,
                                        const EstimatorOptions& opts = {}) {
  return estimate_u_hqx(y, Vector::Ones(y.rows()), theta, mu, opts,
                        [](Eigen::Ref<Matrix>) {});
}

/// Which prefix vector feeds step i of the sequential estimator. `theory`
/// uses Z[i+1] = H_{i+1}...H_m 1, the row sums of the trailing product;
/// `pseudocode` uses Z[i]. They coincide under identity initialization.
enum class ZIndex { theory, pseudocode };

struct SequentialOptions {
  double zeta = 0.5;
  double epsilon = 1e-8;
  ZIndex z_index = ZIndex::theory;
};

struct SequentialResult {
  OrthogonalProduct V_hat;
  SparseMatrix X_hat;
  std::vector<RecoveryDiagnostics> steps;
};

/// Sequential estimate of V = H_1 ... H_m.
///
/// Prefix vectors come from init (Z[m+1] = 1, Z[i] = H_i Z[i+1]). Step i
/// estimates H_i from the current data and then replaces the data by
/// H_i^T times it. Total cost O(nmp).
inline SequentialResult recover_v_sequential(const Matrix& y, std::size_t m,
                                             double theta, double mu,
                                             const OrthogonalProduct& init,
                                             const SequentialOptions& opts = {}) {
  if (init.size() != m) {
    throw DimensionMismatch("initialization has " +
                            std::to_string(init.size()) + " factors, m = " +
                            std::to_string(m));
  }
  detail::require_dim(init.dim(), y.rows(), "recover_v_sequential");

  // z[i] for i = 1..m+1; z[0] unused.
  std::vector<Vector> z(m + 2);
  z[m + 1] = Vector::Ones(y.rows());
  for (std::size_t i = m; i >= 1; --i) {
    z[i] = init[i - 1] ? init[i - 1]->apply(z[i + 1]) : z[i + 1];
  }

  EstimatorOptions step_opts;
  step_opts.zeta = opts.zeta;
  step_opts.epsilon = opts.epsilon;
  step_opts.recover_codes = false;

  Matrix residual = y;
  std::vector<OrthogonalProduct::Slot> factors;
  std::vector<RecoveryDiagnostics> steps;
  factors.reserve(m);
  steps.reserve(m);
  for (std::size_t i = 1; i <= m; ++i) {
    const Vector& s = opts.z_index == ZIndex::theory ? z[i + 1] : z[i];
    try {
      RecoveryResult step = estimate_u_hqx(residual, s, theta, mu, step_opts);
      step.u_hat.apply_in_place(residual);
      steps.push_back(step.diagnostics);
      factors.emplace_back(std::move(step.u_hat));
    } catch (const IllConditioned& e) {
      throw IllConditioned(
          "step " + std::to_string(i) + " of " + std::to_string(m) + ": " +
              e.what(),
          i);
    }
  }
  return {OrthogonalProduct(y.rows(), std::move(factors)),
          hard_threshold(residual, opts.zeta), std::move(steps)};
}

/// recover_v_sequential from the all-identity initialization.
inline SequentialResult recover_v_sequential(const Matrix& y, std::size_t m,
                                             double theta, double mu,
                                             const SequentialOptions& opts = {}) {
  return recover_v_sequential(y, m, theta, mu,
                              OrthogonalProduct::identity(y.rows(), m), opts);
}

}  // namespace housedict
