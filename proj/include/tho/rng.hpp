#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tho {

/// Seeded generator with platform-independent variate transforms.
///
/// std::*_distribution output is implementation defined, so the transforms
/// used by the simulations are written out here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  double normal();
  double exponential();
  /// Gamma(shape, 1) via Marsaglia and Tsang.
  double gamma(double shape);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Stable 64-bit FNV-1a hash.
std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace tho
