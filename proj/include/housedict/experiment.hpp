#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "housedict/baselines.hpp"
#include "housedict/errors.hpp"
#include "housedict/estimators.hpp"
#include "housedict/metrics.hpp"
#include "housedict/random.hpp"
#include "housedict/synthesis.hpp"

namespace housedict {

enum class ExperimentKind {
  fig3_linf_vs_p,
  fig4_xerr_vs_p,
  fig5_noise,
  fig1_frobV_vs_m,
  fig2_frobV_vs_p,
  custom
};

enum class Estimator { alg1, alg1_alt, alg3 };

inline std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::fig3_linf_vs_p: return "fig3_linf_vs_p";
    case ExperimentKind::fig4_xerr_vs_p: return "fig4_xerr_vs_p";
    case ExperimentKind::fig5_noise: return "fig5_noise";
    case ExperimentKind::fig1_frobV_vs_m: return "fig1_frobV_vs_m";
    case ExperimentKind::fig2_frobV_vs_p: return "fig2_frobV_vs_p";
    case ExperimentKind::custom: return "custom";
  }
  return "custom";
}

inline std::optional<ExperimentKind> parse_experiment_kind(std::string_view s) {
  for (auto k : {ExperimentKind::fig3_linf_vs_p, ExperimentKind::fig4_xerr_vs_p,
                 ExperimentKind::fig5_noise, ExperimentKind::fig1_frobV_vs_m,
                 ExperimentKind::fig2_frobV_vs_p, ExperimentKind::custom}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

inline std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::alg1: return "alg1";
    case Estimator::alg1_alt: return "alg1_alt";
    case Estimator::alg3: return "alg3";
  }
  return "alg1";
}

inline std::optional<Estimator> parse_estimator(std::string_view s) {
  for (auto e : {Estimator::alg1, Estimator::alg1_alt, Estimator::alg3}) {
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

inline constexpr std::string_view kProcrustesMethod = "procrustes_known_x";

/// One sweep: the cartesian grid m x theta x snr_db x p, `trials` seeded
/// trials per grid point, and one result row per method per trial.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::custom;
  Index n = 1000;
  std::vector<Index> p_list;
  std::vector<std::size_t> m_list{1};
  std::vector<double> theta_list;
  /// nullopt is the noiseless setting.
  std::vector<std::optional<double>> snr_db_list{std::nullopt};
  int trials = 1;
  std::uint64_t seed = 0;
  double zeta = 0.5;
  Estimator estimator = Estimator::alg1;
  bool procrustes_known_x = false;

  GeneratorOptions generator;
  double value_low = 1.0;
  double value_high = 2.0;
  ZIndex z_index = ZIndex::theory;
  /// Wall time is the only non-deterministic column; off by default so
  /// repeated runs produce identical bytes.
  bool record_timing = false;

  void validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (n < 2) fail("n must be >= 2");
    if (p_list.empty()) fail("p_list must not be empty");
    if (m_list.empty()) fail("m_list must not be empty");
    if (theta_list.empty()) fail("theta_list must not be empty");
    if (snr_db_list.empty()) fail("snr_db_list must not be empty");
    if (trials < 1) fail("trials must be >= 1");
    for (auto p : p_list) {
      if (p < 1) fail("every p must be >= 1");
    }
    for (auto m : m_list) {
      if (m < 1) fail("every m must be >= 1");
      if (m != 1 && estimator != Estimator::alg3) {
        fail("estimator " + std::string(to_string(estimator)) +
             " recovers a single reflector; m_list must be [1]");
      }
    }
    for (auto t : theta_list) {
      if (!(t > 0.0 && t <= 1.0)) fail("every theta must lie in (0, 1]");
    }
    for (const auto& s : snr_db_list) {
      if (s && !std::isfinite(*s)) fail("snr_db values must be finite or none");
    }
    if (!(zeta >= 0.0)) fail("zeta must be >= 0");
    if (!(value_low < value_high)) fail("value_low must be < value_high");
    if (!(value_low + value_high > 0.0)) fail("support value mean must be > 0");
    if (!(generator.min_abs_c >= 0.0)) fail("min_abs_c must be >= 0");
    if (generator.retry_budget < 1) fail("retry_budget must be >= 1");
  }
};

/// One CSV record. Absent optionals are written as empty fields.
struct ResultRow {
  ExperimentKind kind = ExperimentKind::custom;
  Index n = 0;
  Index p = 0;
  std::size_t m = 0;
  double theta = 0.0;
  std::optional<double> snr_db;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string method;
  std::optional<double> linf_u;
  std::optional<double> frob_v;
  std::optional<double> x_err_per_entry;
  std::optional<double> support_f1;
  std::optional<double> wall_time_ms;
  std::vector<std::string> flags;

  bool has_flag(std::string_view f) const {
    for (const auto& x : flags) {
      if (x == f) return true;
    }
    return false;
  }

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr std::string_view kFlagClamped = "c_clamped";
inline constexpr std::string_view kFlagIllConditioned = "ill_conditioned";
inline constexpr std::string_view kFlagSingular = "singular_input";

/// Largest possible ||V - V_hat||_F between orthogonal matrices; recorded
/// for trials whose method failed.
inline double max_frobenius_error(Index n) {
  return 2.0 * std::sqrt(static_cast<double>(n));
}

/// Recorded as linf_u for failed single-reflector trials.
inline constexpr double kMaxLinfError = 2.0;

namespace detail {

struct GridPoint {
  std::size_t m;
  double theta;
  std::optional<double> snr_db;
  Index p;
};

struct TrialTask {
  GridPoint point;
  int trial;
};

inline std::vector<TrialTask> enumerate_tasks(const ExperimentSpec& spec) {
  std::vector<TrialTask> tasks;
  for (auto m : spec.m_list) {
    for (auto theta : spec.theta_list) {
      for (const auto& snr : spec.snr_db_list) {
        for (auto p : spec.p_list) {
          for (int t = 0; t < spec.trials; ++t) {
            tasks.push_back({{m, theta, snr, p}, t});
          }
        }
      }
    }
  }
  return tasks;
}

/// Depends on (seed, n, trial) only, so every grid point sees the same
/// ground-truth factors for a given trial and comparisons across p, theta,
/// and SNR are paired.
inline std::uint64_t trial_seed(const ExperimentSpec& spec, int trial) {
  return mix_seed(mix_seed(spec.seed, static_cast<std::uint64_t>(spec.n)),
                  static_cast<std::uint64_t>(trial));
}

inline void fill_failure(ResultRow& row, std::string_view flag) {
  row.flags.emplace_back(flag);
  if (row.m == 1 && row.method != kProcrustesMethod) row.linf_u = kMaxLinfError;
  row.frob_v = max_frobenius_error(row.n);
}

inline void fill_code_metrics(ResultRow& row, const SyntheticInstance& inst,
                              const SparseMatrix& x_hat) {
  row.x_err_per_entry = x_error_per_entry(inst.X, x_hat);
  row.support_f1 = support_f1(inst.X, x_hat);
}

inline ResultRow evaluate_method(const ExperimentSpec& spec,
                                 const SyntheticInstance& inst,
                                 ResultRow row) {
  const double theta = inst.model.theta();
  const double mu = inst.model.mu();
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto stop_clock = [&] {
    if (spec.record_timing) {
      row.wall_time_ms =
          std::chrono::duration<double, std::milli>(clock::now() - start)
              .count();
    }
  };

  try {
    if (row.method == kProcrustesMethod) {
      const Matrix v_hat = procrustes_known_x(inst.Y, inst.X);
      stop_clock();
      row.frob_v = frobenius_error_v(inst.V, v_hat);
      fill_code_metrics(row, inst, hard_threshold(v_hat.transpose() * inst.Y,
                                                  spec.zeta));
      return row;
    }

    if (spec.estimator == Estimator::alg3) {
      SequentialOptions opts;
      opts.zeta = spec.zeta;
      opts.z_index = spec.z_index;
      const SequentialResult res =
          recover_v_sequential(inst.Y, inst.m(), theta, mu, opts);
      stop_clock();
      if (inst.m() == 1) {
        row.linf_u = linf_error_up_to_sign(inst.V[0]->u(), res.V_hat[0]->u());
      }
      row.frob_v = frobenius_error_v(inst.V, res.V_hat);
      fill_code_metrics(row, inst, res.X_hat);
      return row;
    }

    EstimatorOptions opts;
    opts.zeta = spec.zeta;
    const RecoveryResult res = spec.estimator == Estimator::alg1
                                   ? estimate_u_hx(inst.Y, theta, mu, opts)
                                   : estimate_u_hx_alt(inst.Y, theta, mu, opts);
    stop_clock();
    if (res.diagnostics.c_clamped) row.flags.emplace_back(kFlagClamped);
    row.linf_u = linf_error_up_to_sign(inst.V[0]->u(), res.u_hat.u());
    row.frob_v = frobenius_error_v(inst.V,
                                   OrthogonalProduct::from_factors({res.u_hat}));
    fill_code_metrics(row, inst, *res.X_hat);
  } catch (const IllConditioned&) {
    stop_clock();
    fill_failure(row, kFlagIllConditioned);
  } catch (const SingularInput&) {
    stop_clock();
    fill_failure(row, kFlagSingular);
  }
  return row;
}

inline std::vector<ResultRow> run_task(const ExperimentSpec& spec,
                                       const TrialTask& task) {
  const SparseModel model(task.point.theta, spec.value_low, spec.value_high);
  const std::uint64_t seed = trial_seed(spec, task.trial);
  const SyntheticInstance inst =
      make_instance(spec.n, task.point.p, task.point.m, model,
                    task.point.snr_db, spec.generator, RngSpec{seed, 0});

  ResultRow base;
  base.kind = spec.kind;
  base.n = spec.n;
  base.p = task.point.p;
  base.m = task.point.m;
  base.theta = task.point.theta;
  base.snr_db = task.point.snr_db;
  base.trial = task.trial;
  base.seed = seed;

  std::vector<ResultRow> rows;
  base.method = std::string(to_string(spec.estimator));
  rows.push_back(evaluate_method(spec, inst, base));
  if (spec.procrustes_known_x) {
    base.method = std::string(kProcrustesMethod);
    rows.push_back(evaluate_method(spec, inst, base));
  }
  return rows;
}

}  // namespace detail

using RowSink = std::function<void(const ResultRow&)>;

/// Runs every trial of spec and hands rows to sink in canonical order (grid
/// point, then trial, then method) regardless of thread count. Methods that
/// fail with IllConditioned or SingularInput produce flagged rows; other
/// exceptions abort the sweep and are rethrown.
inline void run_experiment(const ExperimentSpec& spec, const RowSink& sink,
                           unsigned threads = 1) {
  spec.validate();
  const auto tasks = detail::enumerate_tasks(spec);
  if (threads <= 1 || tasks.size() <= 1) {
    for (const auto& task : tasks) {
      for (const auto& row : detail::run_task(spec, task)) sink(row);
    }
    return;
  }

  std::vector<std::vector<ResultRow>> done(tasks.size());
  std::vector<char> ready(tasks.size(), 0);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        auto rows = detail::run_task(spec, tasks[i]);
        std::lock_guard lock(mu);
        done[i] = std::move(rows);
        ready[i] = 1;
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        stop = true;
      }
      cv.notify_all();
    }
  };

  {
    std::vector<std::jthread> pool;
    const unsigned count =
        std::min<unsigned>(threads, static_cast<unsigned>(tasks.size()));
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);

    try {
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        std::vector<ResultRow> rows;
        {
          std::unique_lock lock(mu);
          cv.wait(lock, [&] { return ready[i] || error; });
          if (!ready[i]) break;
          rows = std::move(done[i]);
        }
        for (const auto& row : rows) sink(row);
      }
    } catch (...) {
      stop = true;
      throw;
    }
    stop = true;
  }
  if (error) std::rethrow_exception(error);
}

inline std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                             unsigned threads = 1) {
  std::vector<ResultRow> rows;
  run_experiment(spec, [&](const ResultRow& r) { rows.push_back(r); }, threads);
  return rows;
}

}  // namespace housedict
