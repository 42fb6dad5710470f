#pragma once

#include <cstdint>
#include <span>

namespace rbd {

// Algorithm identifier stored in every report so runs can be replayed by any
// implementation of the same generator.
inline constexpr char kRngId[] = "philox4x32-10";

namespace detail {

// One keyed Philox4x32 block, 10 rounds (Salmon et al. constants).
inline void philox4x32_rounds(std::uint32_t c[4], std::uint32_t k0,
                              std::uint32_t k1) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int r = 0; r < 10; ++r) {
    const std::uint64_t p0 = std::uint64_t(kM0) * c[0];
    const std::uint64_t p1 = std::uint64_t(kM1) * c[2];
    const std::uint32_t t1 = c[1], t3 = c[3];
    c[0] = std::uint32_t(p1 >> 32) ^ t1 ^ k0;
    c[1] = std::uint32_t(p1);
    c[2] = std::uint32_t(p0 >> 32) ^ t3 ^ k1;
    c[3] = std::uint32_t(p0);
    k0 += kW0;
    k1 += kW1;
  }
}

}  // namespace detail

inline void philox4x32_block(std::uint64_t seed, std::uint32_t stream,
                             std::uint64_t block, std::uint32_t out[4]) {
  std::uint32_t c[4] = {std::uint32_t(block), std::uint32_t(block >> 32),
                        stream, 0u};
  detail::philox4x32_rounds(c, std::uint32_t(seed), std::uint32_t(seed >> 32));
  out[0] = c[0];
  out[1] = c[1];
  out[2] = c[2];
  out[3] = c[3];
}

// Word-addressable uniform u32 stream. Every word has a fixed index, so
// consumers may draw single cells or whole ranges in any order and always see
// the same values. word(i) == fill(i, span-of-one) by construction.
class UniformStream {
 public:
  UniformStream(std::uint64_t seed, std::uint32_t stream)
      : seed_(seed), stream_(stream) {}

  std::uint32_t word(std::uint64_t index) const {
    std::uint32_t b[4];
    philox4x32_block(seed_, stream_, index >> 2, b);
    return b[index & 3];
  }

  // Bulk generation of words [first, first + out.size()); kernel-dispatched.
  void fill(std::uint64_t first, std::span<std::uint32_t> out) const;

  double unit(std::uint64_t index) const { return word(index) * 0x1p-32; }

  std::uint64_t seed() const { return seed_; }
  std::uint32_t stream() const { return stream_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint32_t stream_ = 0;
};

// Order-sensitive derivation of per-trial seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace rbd
