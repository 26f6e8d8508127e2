#pragma once
#include <cstdint>

namespace qtherm {

// One independent stream per trajectory, derived from (master_seed, stream)
// by splitmix64 expansion, so that a run is reproducible for any thread
// count: trajectory i always consumes the same draws regardless of which
// worker executes it.
class Rng {
 public:
  Rng(uint64_t master_seed, uint64_t stream);

  uint64_t next_u64();          // xoshiro256++
  double uniform();             // [0, 1), 53-bit resolution
  double normal(double sigma);  // N(0, sigma^2), Box-Muller with cached spare

 private:
  uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qtherm
