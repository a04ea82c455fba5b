#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace morphmc {

/// Derives an independent 64-bit seed for a numbered stream (splitmix64
/// finalizer over seed + (stream+1) * golden gamma). Used to give each
/// concurrent chain its own generator.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic random stream for one chain. The generator is mt19937_64;
/// the variate algorithms are fixed here rather than taken from
/// <random> distributions (whose algorithms are implementation-defined), so
/// a seed pins the exact draw sequence:
///   - uniform01: (next64 >> 11) * 2^-53, in [0, 1)
///   - standard_normal(k): ceil(k/2) Box-Muller pairs, two uniforms each,
///     any unused second variate of the last pair discarded
/// One sampler iteration consumes one standard_normal(k) then one uniform01.
class ChainRng {
 public:
  explicit ChainRng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  Eigen::VectorXd standard_normal(int k) {
    Eigen::VectorXd z(k);
    for (int i = 0; i < k; i += 2) {
      const double u1 = uniform01();
      const double u2 = uniform01();
      const double rad = std::sqrt(-2.0 * std::log1p(-u1));  // 1-u1 in (0,1]
      const double ang = 2.0 * std::numbers::pi * u2;
      z(i) = rad * std::cos(ang);
      if (i + 1 < k) z(i + 1) = rad * std::sin(ang);
    }
    return z;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace morphmc
