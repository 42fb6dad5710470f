#include <cstring>

#include "rbd/kernels/api.hpp"
#include "rbd/rng.hpp"

namespace rbd::kernels {
namespace {

void philox_fill_scalar(std::uint64_t seed, std::uint32_t stream,
                        std::uint64_t first, std::size_t count,
                        std::uint32_t* out) {
  std::size_t produced = 0;
  std::uint64_t index = first;
  while (produced < count) {
    std::uint32_t block[4];
    philox4x32_block(seed, stream, index >> 2, block);
    std::size_t lane = std::size_t(index & 3);
    while (lane < 4 && produced < count) {
      out[produced++] = block[lane++];
    }
    index = (index & ~std::uint64_t(3)) + 4;
  }
}

void sample_labels_scalar(const std::uint32_t* words, std::size_t count,
                          const std::uint64_t* cum, int m, std::uint16_t* out) {
  for (std::size_t i = 0; i < count; ++i) {
    int c = 0;
    for (int k = 0; k < m; ++k) c += std::uint64_t(words[i]) >= cum[k] ? 1 : 0;
    out[i] = std::uint16_t(c);
  }
}

void sample_conditional_scalar(const std::uint32_t* words,
                               const std::uint16_t* given, std::size_t count,
                               const std::uint64_t* cum, int m,
                               std::size_t stride, std::uint16_t* out) {
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t* row = cum + std::size_t(given[i]) * stride;
    int c = 0;
    for (int k = 0; k < m; ++k) c += std::uint64_t(words[i]) >= row[k] ? 1 : 0;
    out[i] = std::uint16_t(c);
  }
}

void ml_scores_scalar(const std::uint16_t* desc, std::size_t slots,
                      const std::uint16_t* cols, std::size_t cands,
                      const double* logp, std::size_t vocab, double* out) {
  for (std::size_t y = 0; y < cands; ++y) out[y] = 0.0;
  for (std::size_t i = 0; i < slots; ++i) {
    const double* row = logp + std::size_t(desc[i]) * vocab;
    const std::uint16_t* col = cols + i * cands;
    for (std::size_t y = 0; y < cands; ++y) out[y] += row[col[y]];
  }
}

void match_mask_scalar(const std::uint16_t* desc, std::size_t slots,
                       const std::uint16_t* cols, std::size_t cands,
                       std::uint8_t* out) {
  std::memset(out, 1, cands);
  for (std::size_t i = 0; i < slots; ++i) {
    const std::uint16_t want = desc[i];
    const std::uint16_t* col = cols + i * cands;
    for (std::size_t y = 0; y < cands; ++y) {
      out[y] = std::uint8_t(out[y] & (col[y] == want ? 1u : 0u));
    }
  }
}

void hash_columns_scalar(const std::uint16_t* cols, std::size_t slots,
                         std::size_t cands, std::uint64_t* out) {
  constexpr std::uint32_t kFnvPrime = 16777619u;
  std::vector<std::uint32_t> a(cands, 2166136261u);
  std::vector<std::uint32_t> b(cands, 0x9E3779B9u);
  for (std::size_t i = 0; i < slots; ++i) {
    const std::uint16_t* col = cols + i * cands;
    for (std::size_t y = 0; y < cands; ++y) {
      a[y] = (a[y] ^ col[y]) * kFnvPrime;
      b[y] = b[y] * 2654435761u + col[y] + 1u;
    }
  }
  for (std::size_t y = 0; y < cands; ++y) {
    out[y] = (std::uint64_t(a[y]) << 32) | b[y];
  }
}

}  // namespace

const Kernels& scalar() {
  static const Kernels k = {
      "scalar",
      philox_fill_scalar,
      sample_labels_scalar,
      sample_conditional_scalar,
      ml_scores_scalar,
      match_mask_scalar,
      hash_columns_scalar,
  };
  return k;
}

}  // namespace rbd::kernels
