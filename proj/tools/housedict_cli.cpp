// Experiment runner for structured orthogonal dictionary learning.
//
//   housedict run <config.yaml> [--seed N] [--out-dir DIR] [--threads N]
//                               [--zeta Z] [--trials N] [--timing]
//   housedict demo <fig1|fig2|fig3|fig4|fig5> [same flags] [--preset-dir DIR]
//   housedict plot <results.csv> [--out-dir DIR] [--metric NAME]...
//   housedict instance --n N --p P [--m M] [--theta T] [--snr-db S]
//                      [--seed N] -o FILE
//
// Exit status: 0 on success, 2 on a configuration or usage error, 3 on an
// I/O error, 1 otherwise.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "housedict/housedict.hpp"
#include "json.hpp"

#ifndef HOUSEDICT_PRESET_DIR
#define HOUSEDICT_PRESET_DIR "presets"
#endif

namespace fs = std::filesystem;
using namespace housedict;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<double> zeta;
  std::string out_dir = "results";
  unsigned threads = 1;
  bool timing = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--seed", flags.seed, "Override the base seed");
  cmd->add_option("--trials", flags.trials, "Override trials per grid point");
  cmd->add_option("--zeta", flags.zeta, "Override the hard threshold");
  cmd->add_option("--out-dir", flags.out_dir, "Output directory")
      ->capture_default_str();
  cmd->add_option("--threads", flags.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--timing", flags.timing,
                "Record wall_time_ms (output is then not byte-reproducible)");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void write_metadata(const std::string& path, const ExperimentSpec& spec,
                    const std::string& config, const std::string& csv) {
  nlohmann::json meta;
  meta["generator"] = std::string(kGeneratorName);
  meta["config"] = config;
  meta["csv"] = csv;
  meta["csv_header"] = std::string(kCsvHeader);
  meta["experiment_kind"] = std::string(to_string(spec.kind));
  meta["seed"] = spec.seed;
  meta["trials"] = spec.trials;
  meta["zeta"] = spec.zeta;
  meta["estimator"] = std::string(to_string(spec.estimator));
  meta["u_distribution"] = to_string(spec.generator.u_distribution);
  meta["z_index"] = spec.z_index == ZIndex::theory ? "theory" : "pseudocode";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << meta.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

int run_config(const std::string& config_path, const RunFlags& flags) {
  ExperimentSpec spec = cli::load_experiment_spec(config_path);
  if (flags.seed) spec.seed = *flags.seed;
  if (flags.trials) spec.trials = *flags.trials;
  if (flags.zeta) spec.zeta = *flags.zeta;
  if (flags.timing) spec.record_timing = true;
  spec.validate();

  ensure_dir(flags.out_dir);
  const std::string stem =
      (fs::path(flags.out_dir) / fs::path(config_path).stem()).string();
  const std::string csv_path = stem + ".csv";

  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot open " + csv_path + " for writing");
  CsvWriter writer(csv);
  std::vector<ResultRow> rows;
  std::size_t failures = 0;
  run_experiment(
      spec,
      [&](const ResultRow& r) {
        writer.write(r);
        if (!r.flags.empty()) ++failures;
        rows.push_back(r);
      },
      flags.threads);
  csv.flush();
  if (!csv) throw IoError("write failed: " + csv_path);

  write_metadata(stem + ".meta.json", spec, config_path, csv_path);
  std::vector<std::string> plots;
  try {
    plots = write_plots(rows, stem);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }

  std::cout << "wrote " << rows.size() << " rows to " << csv_path << '\n';
  if (failures) std::cout << failures << " rows carry flags\n";
  for (const auto& p : plots) std::cout << "wrote " << p << '\n';
  return 0;
}

int plot_csv(const std::string& csv_path, const std::string& out_dir,
             const std::vector<std::string>& metric_names) {
  std::vector<ResultRow> rows;
  try {
    rows = read_csv(csv_path);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  std::vector<Metric> metrics;
  for (const auto& name : metric_names) {
    const auto m = parse_metric(name);
    if (!m) throw ConfigError("unknown metric '" + name + "'");
    metrics.push_back(*m);
  }
  if (metrics.empty()) metrics.assign(std::begin(kAllMetrics), std::end(kAllMetrics));

  const fs::path dir = out_dir.empty() ? fs::path(csv_path).parent_path()
                                       : fs::path(out_dir);
  if (!dir.empty()) ensure_dir(dir.string());
  const std::string stem = (dir / fs::path(csv_path).stem()).string();
  try {
    for (const auto& p : write_plots(rows, stem, metrics)) {
      std::cout << "wrote " << p << '\n';
    }
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured orthogonal dictionary learning experiments"};
  app.require_subcommand(1);

  RunFlags run_flags;
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a sweep from a YAML configuration");
  run->add_option("config", config_path, "Configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  add_run_flags(run, run_flags);

  RunFlags demo_flags;
  std::string figure;
  std::string preset_dir = HOUSEDICT_PRESET_DIR;
  auto* demo = app.add_subcommand("demo", "Run a shipped preset");
  demo->add_option("figure", figure, "Preset name")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4", "fig5"}));
  demo->add_option("--preset-dir", preset_dir, "Directory holding presets")
      ->capture_default_str();
  add_run_flags(demo, demo_flags);

  std::string csv_path;
  std::string plot_dir;
  std::vector<std::string> metrics;
  auto* plot = app.add_subcommand("plot", "Render SVG plots from a result CSV");
  plot->add_option("csv", csv_path, "Result CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--out-dir", plot_dir, "Output directory (default: next to the CSV)");
  plot->add_option("--metric", metrics,
                   "linf_u, frob_v, x_err_per_entry or support_f1 (repeatable)");

  Index inst_n = 0;
  Index inst_p = 0;
  std::size_t inst_m = 1;
  double inst_theta = 0.3;
  std::optional<double> inst_snr;
  std::uint64_t inst_seed = 0;
  std::string inst_dist = "uniform";
  std::string inst_out;
  auto* inst = app.add_subcommand("instance", "Generate one instance and dump it as JSON");
  inst->add_option("--n", inst_n, "Rows")->required();
  inst->add_option("--p", inst_p, "Columns")->required();
  inst->add_option("--m", inst_m, "Householder factors")->capture_default_str();
  inst->add_option("--theta", inst_theta, "Support probability")->capture_default_str();
  inst->add_option("--snr-db", inst_snr, "Target SNR in dB (default: noiseless)");
  inst->add_option("--seed", inst_seed, "Seed")->capture_default_str();
  inst->add_option("--u-distribution", inst_dist, "uniform or gaussian")
      ->check(CLI::IsMember({"uniform", "gaussian"}))
      ->capture_default_str();
  inst->add_option("-o,--output", inst_out, "Output JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) return run_config(config_path, run_flags);
    if (*demo) {
      const auto path = (fs::path(preset_dir) / (figure + ".yaml")).string();
      if (!fs::exists(path)) throw ConfigError("preset not found: " + path);
      return run_config(path, demo_flags);
    }
    if (*plot) return plot_csv(csv_path, plot_dir, metrics);
    if (*inst) {
      GeneratorOptions gen;
      gen.u_distribution = inst_dist == "gaussian" ? VectorDistribution::gaussian
                                                   : VectorDistribution::uniform;
      SyntheticInstance instance = [&] {
        try {
          return make_instance(inst_n, inst_p, inst_m, SparseModel(inst_theta),
                               inst_snr, gen, RngSpec{inst_seed, 0});
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }();
      try {
        save_instance(instance, inst_out);
      } catch (const std::runtime_error& e) {
        throw IoError(e.what());
      }
      std::cout << "wrote " << inst_out << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
