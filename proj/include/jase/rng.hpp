#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "jase/special.hpp"

namespace jase {

/// splitmix64 finalizer; used to derive independent substreams from one
/// user-facing seed so that parallel scheduling cannot affect results.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t substream(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed ^ mix64(index));
}

/// Deterministic random source. mt19937_64 output is mandated by the
/// standard, and all variate transforms here are our own, so identical
/// seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0,1), never exactly 0 or 1.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via inverse CDF.
  double normal() { return normal_quantile(uniform()); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Unbiased integer in [0, n), n >= 1 (Lemire multiply-shift).
  std::uint64_t integer_below(std::uint64_t n) {
    using u128 = unsigned __int128;
    u128 m = static_cast<u128>(engine_()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t t = -n % n;
      while (lo < t) {
        m = static_cast<u128>(engine_()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::mt19937_64 engine_;
};

/// rows x cols matrix of iid standard normals, filled row-major.
inline Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows,
                                              Eigen::Index cols,
                                              std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      out(i, j) = rng.normal();
    }
  }
  return out;
}

}  // namespace jase
