#pragma once

// Instance dump format (JSON, schema tag "housedict.instance/1"):
//
//   schema       "housedict.instance/1"
//   generator    PRNG algorithm name
//   n, p, m      dimensions
//   theta, value_low, value_high
//   snr_db       number or null (noiseless)
//   noise_sigma  per-entry noise standard deviation actually used
//   seed, stream_id
//   u_vectors    m arrays of n numbers (null marks an identity slot)
//   x_triplets   [row, col, value] for every non-zero of X, column-major
//
// Y is not stored. Loading recomputes V X and regenerates the noise from
// (seed, stream_id), which reproduces Y bit-for-bit on the same build.

#include <fstream>
#include <string>
#include <vector>

#include "housedict/synthesis.hpp"
#include "json.hpp"

namespace housedict {

inline constexpr const char* kInstanceSchema = "housedict.instance/1";

inline nlohmann::json instance_to_json(const SyntheticInstance& inst) {
  nlohmann::json j;
  j["schema"] = kInstanceSchema;
  j["generator"] = std::string(kGeneratorName);
  j["n"] = inst.n();
  j["p"] = inst.p();
  j["m"] = inst.m();
  j["theta"] = inst.model.theta();
  j["value_low"] = inst.model.value_low();
  j["value_high"] = inst.model.value_high();
  j["snr_db"] = inst.snr_db ? nlohmann::json(*inst.snr_db) : nlohmann::json();
  j["noise_sigma"] = inst.noise_sigma;
  j["seed"] = inst.rng.seed;
  j["stream_id"] = inst.rng.stream_id;

  auto& us = j["u_vectors"] = nlohmann::json::array();
  for (const auto& slot : inst.V.slots()) {
    if (!slot) {
      us.push_back(nullptr);
      continue;
    }
    us.push_back(std::vector<double>(slot->u().data(),
                                     slot->u().data() + slot->u().size()));
  }
  auto& xs = j["x_triplets"] = nlohmann::json::array();
  for (Index c = 0; c < inst.X.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(inst.X, c); it; ++it) {
      xs.push_back({it.row(), it.col(), it.value()});
    }
  }
  return j;
}

inline SyntheticInstance instance_from_json(const nlohmann::json& j) {
  if (j.value("schema", std::string()) != kInstanceSchema) {
    throw std::runtime_error("unsupported instance schema: " +
                             j.value("schema", std::string("<missing>")));
  }
  const Index n = j.at("n").get<Index>();
  const Index p = j.at("p").get<Index>();
  SparseModel model(j.at("theta").get<double>(),
                    j.at("value_low").get<double>(),
                    j.at("value_high").get<double>());

  std::vector<OrthogonalProduct::Slot> slots;
  for (const auto& u : j.at("u_vectors")) {
    if (u.is_null()) {
      slots.emplace_back();
      continue;
    }
    const auto values = u.get<std::vector<double>>();
    slots.emplace_back(HouseholderFactor::from_vector(
        Eigen::Map<const Vector>(values.data(),
                                 static_cast<Index>(values.size()))));
  }
  OrthogonalProduct v(n, std::move(slots));

  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& t : j.at("x_triplets")) {
    triplets.emplace_back(t.at(0).get<Index>(), t.at(1).get<Index>(),
                          t.at(2).get<double>());
  }
  SparseMatrix x(n, p);
  x.setFromTriplets(triplets.begin(), triplets.end());
  x.makeCompressed();

  const RngSpec rng{j.at("seed").get<std::uint64_t>(),
                    j.at("stream_id").get<std::uint64_t>()};
  std::optional<double> snr_db;
  if (!j.at("snr_db").is_null()) snr_db = j.at("snr_db").get<double>();
  const double sigma = j.at("noise_sigma").get<double>();

  Matrix y = apply_product(v, Matrix(x));
  if (snr_db) y += regenerate_noise(n, p, sigma, rng);
  return SyntheticInstance{std::move(v), std::move(x), std::move(y), sigma,
                           snr_db,       model,        rng};
}

inline void save_instance(const SyntheticInstance& inst,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << instance_to_json(inst).dump() << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline SyntheticInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return instance_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace housedict
