// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>

#include "dnaskew/kernels.hpp"

namespace dnaskew::kernels {

namespace {

void gf_mul_add_avx2(const GfView& f, Symbol c, const Symbol* src, Symbol* dst, std::size_t n) {
  if (c == 0) return;
  if (f.nibbles == nullptr) {
    scalar().gf_mul_add(f, c, src, dst, n);
    return;
  }
  // Symbols are < 256 here, so the high byte of every 16-bit lane is zero and
  // looks up entry 0 (= 0) in both nibble tables.
  const std::uint8_t* t = f.nibbles + static_cast<std::size_t>(c) * 32;
  const __m256i tlo = _mm256_broadcastsi128_si256(_mm_loadu_si128(reinterpret_cast<const __m128i*>(t)));
  const __m256i thi =
      _mm256_broadcastsi128_si256(_mm_loadu_si128(reinterpret_cast<const __m128i*>(t + 16)));
  const __m256i mask = _mm256_set1_epi8(0x0F);
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    const __m256i lo = _mm256_and_si256(v, mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), mask);
    const __m256i prod = _mm256_xor_si256(_mm256_shuffle_epi8(tlo, lo), _mm256_shuffle_epi8(thi, hi));
    __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
    d = _mm256_xor_si256(d, prod);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), d);
  }
  if (i < n) scalar().gf_mul_add(f, c, src + i, dst + i, n - i);
}

std::uint64_t hsum_epi64(__m256i v) {
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

std::uint64_t sum_sq_diff_avx2(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  __m256i acc64 = zero;
  std::size_t i = 0;
  while (i + 32 <= n) {
    // Each madd lane adds at most 2 * 255^2; flush to 64-bit well before overflow.
    __m256i acc32 = zero;
    const std::size_t stop = std::min(n - (n - i) % 32, i + 32 * 1024);
    for (; i < stop; i += 32) {
      const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
      const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
      const __m256i dlo = _mm256_sub_epi16(_mm256_unpacklo_epi8(va, zero), _mm256_unpacklo_epi8(vb, zero));
      const __m256i dhi = _mm256_sub_epi16(_mm256_unpackhi_epi8(va, zero), _mm256_unpackhi_epi8(vb, zero));
      acc32 = _mm256_add_epi32(acc32, _mm256_madd_epi16(dlo, dlo));
      acc32 = _mm256_add_epi32(acc32, _mm256_madd_epi16(dhi, dhi));
    }
    acc64 = _mm256_add_epi64(acc64, _mm256_unpacklo_epi32(acc32, zero));
    acc64 = _mm256_add_epi64(acc64, _mm256_unpackhi_epi32(acc32, zero));
  }
  std::uint64_t total = hsum_epi64(acc64);
  if (i < n) total += scalar().sum_sq_diff_u8(a + i, b + i, n - i);
  return total;
}

void count_mismatch_avx2(const char* a, const char* b, std::uint32_t* counts, std::size_t n) {
  const __m256i one = _mm256_set1_epi32(1);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i va = _mm256_cvtepu8_epi32(_mm_loadl_epi64(reinterpret_cast<const __m128i*>(a + i)));
    const __m256i vb = _mm256_cvtepu8_epi32(_mm_loadl_epi64(reinterpret_cast<const __m128i*>(b + i)));
    const __m256i ne = _mm256_andnot_si256(_mm256_cmpeq_epi32(va, vb), one);
    __m256i c = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(counts + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(counts + i), _mm256_add_epi32(c, ne));
  }
  if (i < n) scalar().count_mismatch(a + i, b + i, counts + i, n - i);
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", gf_mul_add_avx2, sum_sq_diff_avx2, count_mismatch_avx2};
  return table;
}

}  // namespace dnaskew::kernels
