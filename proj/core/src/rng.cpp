#include "remest/rng.hpp"

namespace remest {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::for_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  return Rng(mix64(mix64(master_seed) ^ mix64(stream_id + 0x632be59bd9b4e019ULL)));
}

}  // namespace remest
