#pragma once

#include <cstdint>
#include <random>

namespace hdx {

/// One splitmix64 step; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Independent stream seed for (master, a, b): hashing instead of sequential
/// draws keeps each snapshot/slot stream reproducible on its own.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1]; never returns 0, so -log(u) is finite.
  double uniform_open0() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * (uniform_open0() - 0x1.0p-53); }
  std::uint64_t poisson(double mean);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  std::uint64_t next() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hdx
