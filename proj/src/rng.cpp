#include "coverpath/rng.hpp"

#include <cmath>
#include <sstream>

namespace coverpath {

int Rng::categorical(const std::vector<double>& probs) {
  double total = 0.0;
  for (double p : probs) total += (p > 0.0 ? p : 0.0);
  double r = uniform() * total;
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += (probs[i] > 0.0 ? probs[i] : 0.0);
    if (r < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

std::string Rng::serialize() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

Rng Rng::deserialize(const std::string& s) {
  Rng r;
  std::istringstream is(s);
  is >> r.engine_;
  return r;
}

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace coverpath
