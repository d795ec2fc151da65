// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace sbg {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  std::uint64_t s = seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  return splitmix64(s);
}

inline std::uint64_t hash_string(std::string_view name) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a offset basis
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// One root seed split into named sub-streams, so each component (type
// sampling, per-player controllers, transitions, ...) is reproducible in
// isolation.
class RngStream {
 public:
  explicit RngStream(std::uint64_t root) : seed_(root) {}

  RngStream sub(std::string_view name) const {
    return RngStream(hash_combine(seed_, hash_string(name)));
  }
  RngStream sub(std::string_view name, std::uint64_t index) const {
    return RngStream(hash_combine(hash_combine(seed_, hash_string(name)), index));
  }

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64 engine() const { return std::mt19937_64(seed_); }

 private:
  std::uint64_t seed_;
};

// Deterministic uniform in [0,1) derived from a (seed, index) pair. Used by
// behaviours that must be pure functions of the history but still "random".
inline double hashed_uniform(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = hash_combine(seed, index);
  std::uint64_t bits = splitmix64(s);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline int sample_index(const std::vector<double>& probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace sbg
