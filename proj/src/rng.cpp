#include "rbd/rng.hpp"

#include "rbd/kernels/api.hpp"

namespace rbd {

void UniformStream::fill(std::uint64_t first, std::span<std::uint32_t> out) const {
  if (out.empty()) return;
  kernels::active().philox_fill(seed_, stream_, first, out.size(), out.data());
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto split = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  return split(split(base ^ split(a + 1)) ^ split(b + 2));
}

}  // namespace rbd
