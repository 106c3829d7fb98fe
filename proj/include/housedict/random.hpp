#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace housedict {

/// Identifies one independent random stream. Equal specs give equal streams
/// (bit-for-bit on the same build).
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

using Engine = std::mt19937_64;

/// Recorded in result metadata and instance dumps.
inline constexpr std::string_view kGeneratorName =
    "mt19937_64 seeded with splitmix64(seed, stream_id)";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive combination of two 64-bit keys.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL));
}

inline RngSpec substream(const RngSpec& parent, std::uint64_t child) {
  return {parent.seed, mix_seed(parent.stream_id, child)};
}

inline Engine make_engine(const RngSpec& spec) {
  return Engine(mix_seed(spec.seed, spec.stream_id));
}

}  // namespace housedict
