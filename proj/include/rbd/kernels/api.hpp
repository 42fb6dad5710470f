#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rbd::kernels {

// Hot inner loops, provided as a scalar reference implementation and as SIMD
// variants selected at runtime. Every variant is bit-exact against scalar:
// integer kernels trivially so, ml_scores because the accumulation order per
// candidate is sequential over slots in all variants (vectorization is across
// candidates, never across the summation).
struct Kernels {
  const char* name;

  // Words [first, first+count) of the keyed philox4x32-10 stream.
  void (*philox_fill)(std::uint64_t seed, std::uint32_t stream,
                      std::uint64_t first, std::size_t count,
                      std::uint32_t* out);

  // out[i] = number of thresholds cum[0..m) that are <= words[i].
  // Thresholds are cumulative probabilities scaled by 2^32 (u64; a value of
  // 2^32 never fires, 0 always fires).
  void (*sample_labels)(const std::uint32_t* words, std::size_t count,
                        const std::uint64_t* cum, int m, std::uint16_t* out);

  // Row-conditional variant: out[i] counts thresholds in row given[i], rows
  // laid out at cum + row*stride with m entries each.
  void (*sample_conditional)(const std::uint32_t* words,
                             const std::uint16_t* given, std::size_t count,
                             const std::uint64_t* cum, int m,
                             std::size_t stride, std::uint16_t* out);

  // out[y] = sum over slots i of logp[desc[i]*vocab + cols[i*cands + y]].
  void (*ml_scores)(const std::uint16_t* desc, std::size_t slots,
                    const std::uint16_t* cols, std::size_t cands,
                    const double* logp, std::size_t vocab, double* out);

  // out[y] = 1 when cols[i*cands + y] == desc[i] for every slot i, else 0.
  void (*match_mask)(const std::uint16_t* desc, std::size_t slots,
                     const std::uint16_t* cols, std::size_t cands,
                     std::uint8_t* out);

  // Per-candidate 64-bit hash of the slot-major column matrix, for duplicate
  // grouping (callers verify exact equality within hash groups).
  void (*hash_columns)(const std::uint16_t* cols, std::size_t slots,
                       std::size_t cands, std::uint64_t* out);
};

enum class Backend { Scalar, Avx2 };

const char* backend_name(Backend b);
bool backend_available(Backend b);
std::vector<Backend> available_backends();
const Kernels& get(Backend b);
const Kernels& scalar();

// Runtime-selected table. Best available backend unless the RBD_KERNELS
// environment variable ("scalar" or "avx2") forces one.
const Kernels& active();

}  // namespace rbd::kernels
