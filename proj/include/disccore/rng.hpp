#pragma once

#include <cmath>
#include <cstdint>

namespace disccore {

// splitmix64 finalizer; fixed bit pattern so seeded runs are identical
// across platforms and standard library versions.
inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// One word per (seed, level, index). Compactions draw from here, keyed by
// their position in the level, so randomness does not depend on how pushes
// were interleaved before a merge.
inline uint64_t stream_word(uint64_t seed, uint64_t level, uint64_t index) {
  uint64_t s = mix64(seed + 0x9e3779b97f4a7c15ull * (level + 1));
  return mix64(s + 0xd1342543de82ef95ull * (index + 1));
}

class rng {
 public:
  explicit rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; avoids std::normal_distribution, which is not portable
  // across library implementations.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  uint64_t below(uint64_t n) { return next() % n; }

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace disccore
