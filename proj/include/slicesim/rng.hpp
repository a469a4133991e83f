#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace slicesim {

// Deterministic seeded random source. Identical (seed, stream) pairs
// reproduce identical draw sequences; distinct streams are decorrelated
// by splitmix64 mixing so modules can draw independently.
class Rng {
 public:
  Rng() : Rng(0, 0) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix(seed, stream)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in {0, ..., n-1}, n >= 1.
  int uniform_int(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                             static_cast<unsigned __int128>(n)) >> 64);
  }

  // Exponential with the given mean (Rayleigh power fading uses mean 1).
  double exponential(double mean = 1.0) {
    return -mean * std::log1p(-uniform01());
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // Order-sensitive combination of seed material, used to derive
  // per-cell and per-module seeds.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (0x9e3779b97f4a7c15ULL + b));
  }
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix(mix(a, b), c);
  }

 private:
  std::mt19937_64 engine_;
};

// Fixed stream ids so module draw sequences never interleave.
namespace rng_stream {
constexpr std::uint64_t kTopology = 1;
constexpr std::uint64_t kChannel = 2;
constexpr std::uint64_t kKmeans = 3;
}  // namespace rng_stream

}  // namespace slicesim
