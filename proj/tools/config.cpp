#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "housedict/errors.hpp"

namespace housedict::cli {

namespace {

void reject_unknown(const YAML::Node& node, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
std::vector<T> read_list(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw ConfigError(key + " must be a list");
  std::vector<T> out;
  for (const auto& item : node) out.push_back(item.as<T>());
  return out;
}

std::optional<double> read_snr(const YAML::Node& item) {
  if (item.IsNull()) return std::nullopt;
  const auto text = item.as<std::string>();
  if (text == "none" || text == "noiseless") return std::nullopt;
  return item.as<double>();
}

void apply(ExperimentSpec& spec, const YAML::Node& root) {
  reject_unknown(root,
                 {"experiment_kind", "n", "p_list", "m_list", "theta_list",
                  "snr_db_list", "trials", "seed", "zeta", "estimator",
                  "baselines", "generator", "options"},
                 "top level");

  if (auto k = root["experiment_kind"]) {
    const auto kind = parse_experiment_kind(k.as<std::string>());
    if (!kind) throw ConfigError("unknown experiment_kind '" + k.as<std::string>() + "'");
    spec.kind = *kind;
  }
  if (auto v = root["n"]) spec.n = v.as<Index>();
  if (auto v = root["p_list"]) spec.p_list = read_list<Index>(v, "p_list");
  if (auto v = root["m_list"]) spec.m_list = read_list<std::size_t>(v, "m_list");
  if (auto v = root["theta_list"]) spec.theta_list = read_list<double>(v, "theta_list");
  if (auto v = root["snr_db_list"]) {
    if (!v.IsSequence()) throw ConfigError("snr_db_list must be a list");
    spec.snr_db_list.clear();
    for (const auto& item : v) spec.snr_db_list.push_back(read_snr(item));
  }
  if (auto v = root["trials"]) spec.trials = v.as<int>();
  if (auto v = root["seed"]) spec.seed = v.as<std::uint64_t>();
  if (auto v = root["zeta"]) spec.zeta = v.as<double>();
  if (auto v = root["estimator"]) {
    const auto e = parse_estimator(v.as<std::string>());
    if (!e) throw ConfigError("unknown estimator '" + v.as<std::string>() + "'");
    spec.estimator = *e;
  }

  if (auto b = root["baselines"]) {
    reject_unknown(b, {"procrustes_known_x"}, "baselines");
    if (auto v = b["procrustes_known_x"]) spec.procrustes_known_x = v.as<bool>();
  }

  if (auto g = root["generator"]) {
    reject_unknown(g,
                   {"u_distribution", "min_abs_c", "retry_budget", "value_low",
                    "value_high"},
                   "generator");
    if (auto v = g["u_distribution"]) {
      const auto d = v.as<std::string>();
      if (d == "uniform") {
        spec.generator.u_distribution = VectorDistribution::uniform;
      } else if (d == "gaussian") {
        spec.generator.u_distribution = VectorDistribution::gaussian;
      } else {
        throw ConfigError("u_distribution must be uniform or gaussian, got '" + d + "'");
      }
    }
    if (auto v = g["min_abs_c"]) spec.generator.min_abs_c = v.as<double>();
    if (auto v = g["retry_budget"]) spec.generator.retry_budget = v.as<int>();
    if (auto v = g["value_low"]) spec.value_low = v.as<double>();
    if (auto v = g["value_high"]) spec.value_high = v.as<double>();
  }

  if (auto o = root["options"]) {
    reject_unknown(o, {"z_index", "record_timing"}, "options");
    if (auto v = o["z_index"]) {
      const auto z = v.as<std::string>();
      if (z == "theory") {
        spec.z_index = ZIndex::theory;
      } else if (z == "pseudocode") {
        spec.z_index = ZIndex::pseudocode;
      } else {
        throw ConfigError("z_index must be theory or pseudocode, got '" + z + "'");
      }
    }
    if (auto v = o["record_timing"]) spec.record_timing = v.as<bool>();
  }
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& text,
                                     const std::string& source) {
  ExperimentSpec spec;
  try {
    const YAML::Node root = YAML::Load(text);
    if (!root.IsMap()) throw ConfigError("configuration must be a mapping");
    apply(spec, root);
  } catch (const YAML::Exception& e) {
    throw ConfigError(source + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_spec(buf.str(), path);
}

}  // namespace housedict::cli
