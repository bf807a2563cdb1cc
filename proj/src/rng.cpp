#include "hdx/rng.hpp"

namespace hdx {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = master;
  std::uint64_t h = splitmix64(s);
  s = h ^ (a * 0xD1B54A32D192ED03ULL);
  h = splitmix64(s);
  s = h ^ (b * 0xAEF17502108EF2D9ULL);
  return splitmix64(s);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::uint64_t> d(mean);
  return d(engine_);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
  return d(engine_);
}

}  // namespace hdx
