#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace coverpath {

// Deterministic RNG used throughout the toolkit. All sampling is implemented
// directly on top of the raw mt19937_64 stream so that results are identical
// across platforms and standard-library versions, and so that the full state
// round-trips through checkpoints.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t uniform_int(uint64_t n) { return engine_() % n; }

  // Standard normal via Box-Muller. Stateless beyond the engine: the sibling
  // variate is discarded so that serialization is just the engine state.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Index sampled from an explicit discrete distribution. Probabilities need
  // not be normalized; negative entries are treated as zero.
  int categorical(const std::vector<double>& probs);

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = uniform_int(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  std::string serialize() const;
  static Rng deserialize(const std::string& s);

  bool operator==(const Rng& o) const { return engine_ == o.engine_; }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 step; used to derive independent seed streams from a master seed.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

}  // namespace coverpath
