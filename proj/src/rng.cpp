#include "qtherm/rng.hpp"

#include <cmath>

namespace qtherm {
namespace {

uint64_t splitmix64(uint64_t& x) {
  uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(uint64_t master_seed, uint64_t stream) {
  // fold the stream index into the seed, then expand; splitmix64 output is
  // well mixed even for adjacent inputs
  uint64_t x = master_seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  for (auto& s : s_) s = splitmix64(x);
  if (!(s_[0] | s_[1] | s_[2] | s_[3])) s_[0] = 1;  // all-zero state is invalid
}

uint64_t Rng::next_u64() {
  const uint64_t r = rotl(s_[0] + s_[3], 23) + s_[0];
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return r;
}

double Rng::uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal(double sigma) {
  if (has_spare_) {
    has_spare_ = false;
    return spare_ * sigma;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);  // log(0) guard
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a) * sigma;
}

}  // namespace qtherm
