#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace esf {

/// mt19937_64 with an explicit 53-bit mapping to [0, 1); unlike
/// std::uniform_real_distribution the stream is the same on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::vector<double> point(int d, double lo, double hi) {
    std::vector<double> v(static_cast<std::size_t>(d));
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace esf
