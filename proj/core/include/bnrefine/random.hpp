#ifndef BNREFINE_RANDOM_HPP
#define BNREFINE_RANDOM_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace bnrefine {

/// Seeded generator whose draws are identical on every platform: the raw
/// mt19937_64 sequence is fixed by the standard, and the conversions below
/// avoid the implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Index drawn with probability proportional to `weights` (non-negative,
  /// positive sum).
  std::size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double u = uniform() * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      acc += weights[i];
      last = i;
      if (u < acc) return i;
    }
    return last;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bnrefine

#endif  // BNREFINE_RANDOM_HPP
