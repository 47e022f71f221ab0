#include "qimp/rng.hpp"

namespace qimp {

namespace {
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag0,
                          std::uint64_t tag1, std::uint64_t tag2,
                          std::uint64_t tag3) {
  std::uint64_t h = mix(master ^ 0x6a09e667f3bcc909ull);
  h = mix(h ^ tag0 * 0x9e3779b97f4a7c15ull);
  h = mix(h ^ tag1 * 0xc2b2ae3d27d4eb4full);
  h = mix(h ^ tag2 * 0x165667b19e3779f9ull);
  h = mix(h ^ tag3 * 0xd6e8feb86659fd93ull);
  return h;
}

} // namespace qimp
