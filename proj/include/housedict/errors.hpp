#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace housedict {

/// Operand shapes do not agree (vector length, row count, factor dimension).
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A closed-form estimator hit a near-zero normalizer (c, or sum_m k_m s_m).
class IllConditioned : public std::runtime_error {
 public:
  explicit IllConditioned(const std::string& what,
                          std::optional<std::size_t> step = std::nullopt)
      : std::runtime_error(what), step_(step) {}

  /// 1-based factor index when raised from the sequential product estimator.
  std::optional<std::size_t> step() const { return step_; }

 private:
  std::optional<std::size_t> step_;
};

/// Polar decomposition input is singular to working tolerance or the
/// iteration failed to converge.
class SingularInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejection sampling for a Householder vector with large |sum(u)| gave up.
class RetryBudgetExhausted : public std::runtime_error {
 public:
  RetryBudgetExhausted(const std::string& what, double best_abs_c)
      : std::runtime_error(what), best_abs_c_(best_abs_c) {}

  double best_abs_c() const { return best_abs_c_; }

 private:
  double best_abs_c_;
};

/// Invalid experiment configuration; raised before any trial runs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace housedict
