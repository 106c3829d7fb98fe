#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "housedict/errors.hpp"
#include "housedict/householder.hpp"
#include "housedict/random.hpp"

namespace housedict {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Bernoulli-Uniform coefficient model: X_ij is non-zero with probability
/// theta, and non-zero values are iid Uniform[value_low, value_high].
class SparseModel {
 public:
  explicit SparseModel(double theta, double value_low = 1.0,
                       double value_high = 2.0)
      : theta_(theta), value_low_(value_low), value_high_(value_high) {
    if (!(theta > 0.0 && theta <= 1.0)) {
      throw std::invalid_argument("theta must lie in (0, 1], got " +
                                  std::to_string(theta));
    }
    if (!(value_low < value_high)) {
      throw std::invalid_argument("value_low must be < value_high");
    }
    if (!(mu() > 0.0)) {
      throw std::invalid_argument(
          "support value mean must be positive for the moment estimators");
    }
  }

  double theta() const { return theta_; }
  double value_low() const { return value_low_; }
  double value_high() const { return value_high_; }
  double mu() const { return 0.5 * (value_low_ + value_high_); }

 private:
  double theta_;
  double value_low_;
  double value_high_;
};

enum class VectorDistribution { gaussian, uniform };

inline const char* to_string(VectorDistribution d) {
  return d == VectorDistribution::gaussian ? "gaussian" : "uniform";
}

/// How ground-truth Householder vectors are drawn.
struct GeneratorOptions {
  /// Uniform means iid Uniform[0,1] entries, which gives sum(u) ~ sqrt(3n)/2.
  VectorDistribution u_distribution = VectorDistribution::uniform;
  double min_abs_c = 0.0;
  int retry_budget = 10000;
};

inline HouseholderFactor sample_householder_vector(
    Index n, VectorDistribution distribution, double min_abs_c, Engine& engine,
    int retry_budget = 10000) {
  if (n < 2) throw DimensionMismatch("Householder vector needs n >= 2");
  if (!(min_abs_c >= 0.0)) throw std::invalid_argument("min_abs_c must be >= 0");

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double best = -1.0;
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) {
      v[i] = distribution == VectorDistribution::gaussian ? gauss(engine)
                                                          : unif(engine);
    }
    if (v.squaredNorm() == 0.0) continue;
    auto h = HouseholderFactor::from_vector(v);
    const double abs_c = std::abs(h.u().sum());
    if (abs_c >= min_abs_c) return h;
    best = std::max(best, abs_c);
  }
  throw RetryBudgetExhausted(
      "no Householder vector with |sum(u)| >= " + std::to_string(min_abs_c) +
          " after " + std::to_string(retry_budget) +
          " attempts; best |sum(u)| = " + std::to_string(best),
      best);
}

inline HouseholderFactor sample_householder_vector(
    Index n, VectorDistribution distribution, double min_abs_c,
    const RngSpec& rng) {
  Engine engine = make_engine(rng);
  return sample_householder_vector(n, distribution, min_abs_c, engine);
}

/// Draws X column by column, so for a fixed stream the first p columns do not
/// depend on the total column count.
inline SparseMatrix sample_sparse_matrix(Index n, Index p,
                                         const SparseModel& model,
                                         Engine& engine) {
  if (n < 1 || p < 1) throw DimensionMismatch("sparse matrix needs n, p >= 1");
  std::bernoulli_distribution on(model.theta());
  std::uniform_real_distribution<double> value(model.value_low(),
                                               model.value_high());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(
      std::ceil(model.theta() * static_cast<double>(n * p) * 1.1)));
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (on(engine)) triplets.emplace_back(i, j, value(engine));
    }
  }
  SparseMatrix x(n, p);
  x.setFromTriplets(triplets.begin(), triplets.end());
  x.makeCompressed();
  return x;
}

inline SparseMatrix sample_sparse_matrix(Index n, Index p,
                                         const SparseModel& model,
                                         const RngSpec& rng) {
  Engine engine = make_engine(rng);
  return sample_sparse_matrix(n, p, model, engine);
}

/// Ground truth plus observation Y = V X + N.
struct SyntheticInstance {
  OrthogonalProduct V;
  SparseMatrix X;
  Matrix Y;
  double noise_sigma = 0.0;
  std::optional<double> snr_db;
  SparseModel model;
  RngSpec rng;

  Index n() const { return Y.rows(); }
  Index p() const { return Y.cols(); }
  std::size_t m() const { return V.size(); }

  /// V X, recomputed through the structured applies.
  Matrix signal() const { return apply_product(V, Matrix(X)); }
};

namespace detail {

enum StreamTag : std::uint64_t {
  kFactorStream = 0,
  kCoefficientStream = 1,
  kNoiseStream = 2,
};

inline Matrix standard_normal(Index n, Index p, const RngSpec& rng) {
  Engine engine = make_engine(rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = gauss(engine);
  }
  return g;
}

}  // namespace detail

/// Per-entry noise standard deviation that puts the realized signal power
/// snr_db decibels above the expected noise power.
inline double noise_sigma_for_snr(const Matrix& signal, double snr_db) {
  const double entries = static_cast<double>(signal.size());
  const double ratio = std::pow(10.0, snr_db / 10.0);
  return std::sqrt(signal.squaredNorm() / (entries * ratio));
}

inline Matrix regenerate_noise(Index n, Index p, double sigma,
                               const RngSpec& rng) {
  return sigma * detail::standard_normal(
                     n, p, substream(rng, detail::kNoiseStream));
}

/// Builds V from m sampled factors, X from the model, and Y = V X + N.
///
/// Factors, coefficients, and noise come from separate substreams of rng, so
/// changing p or snr_db leaves V unchanged and changing snr_db leaves X
/// unchanged. Without snr_db the instance is noiseless.
inline SyntheticInstance make_instance(Index n, Index p, std::size_t m,
                                       const SparseModel& model,
                                       std::optional<double> snr_db,
                                       const GeneratorOptions& gen,
                                       const RngSpec& rng) {
  if (n < 2 || p < 1) throw DimensionMismatch("instance needs n >= 2, p >= 1");

  Engine factor_engine = make_engine(substream(rng, detail::kFactorStream));
  std::vector<OrthogonalProduct::Slot> slots;
  slots.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    slots.emplace_back(sample_householder_vector(
        n, gen.u_distribution, gen.min_abs_c, factor_engine, gen.retry_budget));
  }
  OrthogonalProduct v(n, std::move(slots));

  Engine coef_engine = make_engine(substream(rng, detail::kCoefficientStream));
  SparseMatrix x = sample_sparse_matrix(n, p, model, coef_engine);

  Matrix y = apply_product(v, Matrix(x));
  double sigma = 0.0;
  if (snr_db) {
    sigma = noise_sigma_for_snr(y, *snr_db);
    y += regenerate_noise(n, p, sigma, rng);
  }
  return SyntheticInstance{std::move(v), std::move(x), std::move(y), sigma,
                           snr_db,       model,        rng};
}

}  // namespace housedict
