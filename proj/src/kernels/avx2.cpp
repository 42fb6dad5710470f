#include "rbd/kernels/api.hpp"
#include "rbd/rng.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

#include <cstring>

namespace rbd::kernels {
namespace {

// lo/hi 32-bit halves of the lane-wise u32 product, 8 lanes.
inline void mul_full_u32(__m256i a, std::uint32_t m, __m256i& lo, __m256i& hi) {
  const __m256i mm = _mm256_set1_epi32(int(m));
  const __m256i even = _mm256_mul_epu32(a, mm);
  const __m256i odd = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), mm);
  lo = _mm256_blend_epi32(even, _mm256_slli_epi64(odd, 32), 0xAA);
  hi = _mm256_blend_epi32(_mm256_srli_epi64(even, 32), odd, 0xAA);
}

// Eight consecutive blocks at once, SoA across lanes.
inline void philox_blocks8(std::uint64_t seed, std::uint32_t stream,
                           std::uint64_t block0, std::uint32_t* out32) {
  alignas(32) std::uint32_t c0i[8], c1i[8];
  for (int lane = 0; lane < 8; ++lane) {
    const std::uint64_t b = block0 + std::uint64_t(lane);
    c0i[lane] = std::uint32_t(b);
    c1i[lane] = std::uint32_t(b >> 32);
  }
  __m256i c0 = _mm256_load_si256(reinterpret_cast<const __m256i*>(c0i));
  __m256i c1 = _mm256_load_si256(reinterpret_cast<const __m256i*>(c1i));
  __m256i c2 = _mm256_set1_epi32(int(stream));
  __m256i c3 = _mm256_setzero_si256();

  std::uint32_t k0 = std::uint32_t(seed);
  std::uint32_t k1 = std::uint32_t(seed >> 32);
  for (int r = 0; r < 10; ++r) {
    __m256i lo0, hi0, lo1, hi1;
    mul_full_u32(c0, 0xD2511F53u, lo0, hi0);
    mul_full_u32(c2, 0xCD9E8D57u, lo1, hi1);
    const __m256i k0v = _mm256_set1_epi32(int(k0));
    const __m256i k1v = _mm256_set1_epi32(int(k1));
    const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), k0v);
    const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), k1v);
    c1 = lo1;
    c3 = lo0;
    c0 = n0;
    c2 = n2;
    k0 += 0x9E3779B9u;
    k1 += 0xBB67AE85u;
  }

  // Transpose SoA words back to block order.
  const __m256i t0 = _mm256_unpacklo_epi32(c0, c1);
  const __m256i t1 = _mm256_unpackhi_epi32(c0, c1);
  const __m256i t2 = _mm256_unpacklo_epi32(c2, c3);
  const __m256i t3 = _mm256_unpackhi_epi32(c2, c3);
  const __m256i u0 = _mm256_unpacklo_epi64(t0, t2);
  const __m256i u1 = _mm256_unpackhi_epi64(t0, t2);
  const __m256i u2 = _mm256_unpacklo_epi64(t1, t3);
  const __m256i u3 = _mm256_unpackhi_epi64(t1, t3);
  __m256i* o = reinterpret_cast<__m256i*>(out32);
  _mm256_storeu_si256(o + 0, _mm256_permute2x128_si256(u0, u1, 0x20));
  _mm256_storeu_si256(o + 1, _mm256_permute2x128_si256(u2, u3, 0x20));
  _mm256_storeu_si256(o + 2, _mm256_permute2x128_si256(u0, u1, 0x31));
  _mm256_storeu_si256(o + 3, _mm256_permute2x128_si256(u2, u3, 0x31));
}

void philox_fill_avx2(std::uint64_t seed, std::uint32_t stream,
                      std::uint64_t first, std::size_t count,
                      std::uint32_t* out) {
  std::size_t produced = 0;
  std::uint64_t index = first;

  // Unaligned head, one word at a time.
  while (produced < count && (index & 3) != 0) {
    std::uint32_t block[4];
    philox4x32_block(seed, stream, index >> 2, block);
    out[produced++] = block[index & 3];
    ++index;
  }
  while (count - produced >= 32) {
    philox_blocks8(seed, stream, index >> 2, out + produced);
    produced += 32;
    index += 32;
  }
  while (produced < count) {
    std::uint32_t block[4];
    philox4x32_block(seed, stream, index >> 2, block);
    std::size_t lane = std::size_t(index & 3);
    while (lane < 4 && produced < count) {
      out[produced++] = block[lane++];
      ++index;
    }
  }
}

// Count of thresholds <= u for 8 words; thresholds pre-split into always-fire,
// never-fire, and genuine u32 compares (bias covers the always-fire ones).
struct ThresholdPlan {
  std::vector<std::uint32_t> compare;  // biased by 0x80000000 for signed cmp
  int bias = 0;
};

ThresholdPlan plan_thresholds(const std::uint64_t* cum, int m) {
  ThresholdPlan p;
  for (int k = 0; k < m; ++k) {
    if (cum[k] == 0) {
      ++p.bias;
    } else if (cum[k] <= 0xFFFFFFFFull) {
      p.compare.push_back(std::uint32_t(cum[k]) ^ 0x80000000u);
    }
    // cum[k] == 2^32 never fires.
  }
  return p;
}

inline __m256i count_ge(__m256i words_biased, const ThresholdPlan& p) {
  __m256i acc = _mm256_set1_epi32(p.bias + int(p.compare.size()));
  for (const std::uint32_t tx : p.compare) {
    const __m256i lt =
        _mm256_cmpgt_epi32(_mm256_set1_epi32(int(tx)), words_biased);
    acc = _mm256_add_epi32(acc, lt);  // lt lanes are -1
  }
  return acc;
}

inline void store_counts_u16(__m256i counts, std::uint16_t* out) {
  const __m128i lo = _mm256_castsi256_si128(counts);
  const __m128i hi = _mm256_extracti128_si256(counts, 1);
  _mm_storeu_si128(reinterpret_cast<__m128i*>(out), _mm_packus_epi32(lo, hi));
}

void sample_labels_avx2(const std::uint32_t* words, std::size_t count,
                        const std::uint64_t* cum, int m, std::uint16_t* out) {
  const ThresholdPlan plan = plan_thresholds(cum, m);
  const __m256i sign = _mm256_set1_epi32(int(0x80000000u));
  std::size_t i = 0;
  for (; i + 8 <= count; i += 8) {
    const __m256i w = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(words + i));
    store_counts_u16(count_ge(_mm256_xor_si256(w, sign), plan), out + i);
  }
  for (; i < count; ++i) {
    int c = 0;
    for (int k = 0; k < m; ++k) c += std::uint64_t(words[i]) >= cum[k] ? 1 : 0;
    out[i] = std::uint16_t(c);
  }
}

void sample_conditional_avx2(const std::uint32_t* words,
                             const std::uint16_t* given, std::size_t count,
                             const std::uint64_t* cum, int m,
                             std::size_t stride, std::uint16_t* out) {
  // Row count is bounded by the vocabulary; scan rows and blend.
  int rows = 0;
  for (std::size_t i = 0; i < count; ++i) rows = std::max(rows, int(given[i]) + 1);
  std::vector<ThresholdPlan> plans(rows);
  for (int r = 0; r < rows; ++r) plans[r] = plan_thresholds(cum + r * stride, m);

  const __m256i sign = _mm256_set1_epi32(int(0x80000000u));
  std::size_t i = 0;
  for (; i + 8 <= count; i += 8) {
    const __m256i w = _mm256_loadu_si256(
        reinterpret_cast<const __m256i*>(words + i));
    const __m256i wb = _mm256_xor_si256(w, sign);
    const __m128i g16 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(given + i));
    const __m256i g32 = _mm256_cvtepu16_epi32(g16);
    __m256i acc = _mm256_setzero_si256();
    for (int r = 0; r < rows; ++r) {
      const __m256i rm = _mm256_cmpeq_epi32(g32, _mm256_set1_epi32(r));
      if (_mm256_testz_si256(rm, rm)) continue;
      const __m256i cnt = count_ge(wb, plans[r]);
      acc = _mm256_or_si256(_mm256_and_si256(rm, cnt),
                            _mm256_andnot_si256(rm, acc));
    }
    store_counts_u16(acc, out + i);
  }
  for (; i < count; ++i) {
    const std::uint64_t* row = cum + std::size_t(given[i]) * stride;
    int c = 0;
    for (int k = 0; k < m; ++k) c += std::uint64_t(words[i]) >= row[k] ? 1 : 0;
    out[i] = std::uint16_t(c);
  }
}

void ml_scores_avx2(const std::uint16_t* desc, std::size_t slots,
                    const std::uint16_t* cols, std::size_t cands,
                    const double* logp, std::size_t vocab, double* out) {
  std::size_t y = 0;
  for (; y + 4 <= cands; y += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < slots; ++i) {
      const double* row = logp + std::size_t(desc[i]) * vocab;
      const __m128i idx16 = _mm_loadl_epi64(
          reinterpret_cast<const __m128i*>(cols + i * cands + y));
      const __m128i idx32 = _mm_cvtepu16_epi32(idx16);
      acc = _mm256_add_pd(acc, _mm256_i32gather_pd(row, idx32, 8));
    }
    _mm256_storeu_pd(out + y, acc);
  }
  for (; y < cands; ++y) {
    double s = 0.0;
    for (std::size_t i = 0; i < slots; ++i) {
      s += logp[std::size_t(desc[i]) * vocab + cols[i * cands + y]];
    }
    out[y] = s;
  }
}

void match_mask_avx2(const std::uint16_t* desc, std::size_t slots,
                     const std::uint16_t* cols, std::size_t cands,
                     std::uint8_t* out) {
  std::size_t y = 0;
  for (; y + 16 <= cands; y += 16) {
    __m256i acc = _mm256_set1_epi32(-1);
    for (std::size_t i = 0; i < slots; ++i) {
      const __m256i v = _mm256_loadu_si256(
          reinterpret_cast<const __m256i*>(cols + i * cands + y));
      acc = _mm256_and_si256(acc, _mm256_cmpeq_epi16(v, _mm256_set1_epi16(short(desc[i]))));
    }
    __m256i packed = _mm256_packs_epi16(acc, _mm256_setzero_si256());
    packed = _mm256_permute4x64_epi64(packed, 0xD8);
    __m128i bytes = _mm256_castsi256_si128(packed);
    bytes = _mm_and_si128(bytes, _mm_set1_epi8(1));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out + y), bytes);
  }
  for (; y < cands; ++y) {
    std::uint8_t ok = 1;
    for (std::size_t i = 0; i < slots; ++i) {
      ok = std::uint8_t(ok & (cols[i * cands + y] == desc[i] ? 1u : 0u));
    }
    out[y] = ok;
  }
}

void hash_columns_avx2(const std::uint16_t* cols, std::size_t slots,
                       std::size_t cands, std::uint64_t* out) {
  constexpr std::uint32_t kFnvPrime = 16777619u;
  std::size_t y = 0;
  for (; y + 8 <= cands; y += 8) {
    __m256i a = _mm256_set1_epi32(int(2166136261u));
    __m256i b = _mm256_set1_epi32(int(0x9E3779B9u));
    for (std::size_t i = 0; i < slots; ++i) {
      const __m128i s16 = _mm_loadu_si128(
          reinterpret_cast<const __m128i*>(cols + i * cands + y));
      const __m256i s32 = _mm256_cvtepu16_epi32(s16);
      a = _mm256_mullo_epi32(_mm256_xor_si256(a, s32),
                             _mm256_set1_epi32(int(kFnvPrime)));
      b = _mm256_add_epi32(
          _mm256_mullo_epi32(b, _mm256_set1_epi32(int(2654435761u))),
          _mm256_add_epi32(s32, _mm256_set1_epi32(1)));
    }
    alignas(32) std::uint32_t av[8], bv[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(av), a);
    _mm256_store_si256(reinterpret_cast<__m256i*>(bv), b);
    for (int lane = 0; lane < 8; ++lane) {
      out[y + lane] = (std::uint64_t(av[lane]) << 32) | bv[lane];
    }
  }
  for (; y < cands; ++y) {
    std::uint32_t a = 2166136261u, b = 0x9E3779B9u;
    for (std::size_t i = 0; i < slots; ++i) {
      const std::uint16_t s = cols[i * cands + y];
      a = (a ^ s) * kFnvPrime;
      b = b * 2654435761u + s + 1u;
    }
    out[y] = (std::uint64_t(a) << 32) | b;
  }
}

}  // namespace

const Kernels* avx2_kernels() {
  static const Kernels k = {
      "avx2",
      philox_fill_avx2,
      sample_labels_avx2,
      sample_conditional_avx2,
      ml_scores_avx2,
      match_mask_avx2,
      hash_columns_avx2,
  };
  return &k;
}

}  // namespace rbd::kernels

#else  // !__AVX2__

namespace rbd::kernels {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace rbd::kernels

#endif
