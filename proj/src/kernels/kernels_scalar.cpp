#include "dnaskew/kernels.hpp"

namespace dnaskew::kernels {

namespace {

void gf_mul_add_scalar(const GfView& f, Symbol c, const Symbol* src, Symbol* dst, std::size_t n) {
  if (c == 0) return;
  const std::uint32_t lc = f.log[c];
  for (std::size_t i = 0; i < n; ++i) {
    const Symbol s = src[i];
    if (s != 0) dst[i] ^= f.exp[f.log[s] + lc];
  }
}

std::uint64_t sum_sq_diff_scalar(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
    acc += static_cast<std::uint64_t>(d * d);
  }
  return acc;
}

void count_mismatch_scalar(const char* a, const char* b, std::uint32_t* counts, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) counts[i] += (a[i] != b[i]) ? 1u : 0u;
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table{"scalar", gf_mul_add_scalar, sum_sq_diff_scalar,
                                 count_mismatch_scalar};
  return table;
}

}  // namespace dnaskew::kernels
