#pragma once

#include <cmath>
#include <cstdint>

namespace wdirac {

// splitmix64 stream. Chosen over std::mt19937 because the output sequence is
// fixed by the algorithm itself, which keeps seeded reports byte-identical
// across standard library implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1) with 53 random bits
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * uniform();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // independent stream for sample index i, so per-sample work can be
  // reordered or parallelized without changing any drawn values
  SplitMix64 fork(uint64_t i) const {
    SplitMix64 child(state_ ^ (0x632be59bd9b4e019ull * (i + 1)));
    child.next();
    return child;
  }

 private:
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wdirac
