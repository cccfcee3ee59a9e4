#pragma once

#include <cstdint>
#include <numbers>

#include "aim/types.hpp"

namespace aim {

// Counter-based generator: value i of stream `key` is splitmix64(key + i*GOLDEN).
// Every random quantity in the project flows from one explicit seed through
// this, so runs are reproducible bit-for-bit (and trivially re-implementable
// in other languages for fixture cross-checks).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  /// Uniform in [0, 1), 53 bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform over the disk of radius r (area measure).
  Complex disk(double r = 1.0) {
    const double rad = r * std::sqrt(uniform());
    const double ang = 2.0 * std::numbers::pi * uniform();
    return Complex(rad * std::cos(ang), rad * std::sin(ang));
  }

  /// Uniform magnitude in [r0, r1], uniform angle.
  Complex annulus(double r0, double r1) {
    const double rad = uniform(r0, r1);
    const double ang = 2.0 * std::numbers::pi * uniform();
    return Complex(rad * std::cos(ang), rad * std::sin(ang));
  }

  CMatrix matrix(int n, double scale = 1.0) {
    CMatrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = disk(scale);
    return a;
  }

  CVector vector(int n, double scale = 1.0) {
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = disk(scale);
    return v;
  }

  /// Independent stream derived from this one; unaffected by draws on the parent.
  Rng child(std::uint64_t tag) const { return Rng(mix(key_ ^ mix(tag + 0x632BE59BD9B4E019ULL))); }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace aim
