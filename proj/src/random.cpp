#include "boon/random.hpp"

namespace boon {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t key, std::uint64_t subkey,
                            std::uint64_t domain) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ domain);
  h = mix64(h ^ key);
  h = mix64(h ^ subkey);
  return std::mt19937_64(h);
}

unsigned resolve_threads(unsigned requested) noexcept {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace boon
