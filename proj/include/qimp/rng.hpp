#pragma once

#include <cstdint>

namespace qimp {

// Counter-based generator built on the splitmix64 finalizer. Every consumer
// derives its own stream from (master seed, stream tags), so results are
// reproducible regardless of evaluation order and shots can be drawn
// independently without shared state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
};

// Deterministic stream derivation: hash the master seed together with a
// small set of integer tags (module id, iteration, point index, ...).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag0,
                          std::uint64_t tag1 = 0, std::uint64_t tag2 = 0,
                          std::uint64_t tag3 = 0);

// Stable tags for the seed hierarchy (documented in the README).
namespace seed_tag {
inline constexpr std::uint64_t prepare = 1;
inline constexpr std::uint64_t qpe = 2;
inline constexpr std::uint64_t gf_sweep = 3;
inline constexpr std::uint64_t bath_fit = 4;
inline constexpr std::uint64_t dmft_iter = 5;
inline constexpr std::uint64_t measure = 6;
} // namespace seed_tag

} // namespace qimp
