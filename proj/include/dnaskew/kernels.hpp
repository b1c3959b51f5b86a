#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "dnaskew/gf.hpp"

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation; wider variants are picked once at startup from the CPU
// feature set and must be bit-identical to the reference.
namespace dnaskew::kernels {

/// dst[i] ^= c * src[i] over GF(2^m).
using GfMulAddFn = void (*)(const GfView& field, Symbol c, const Symbol* src, Symbol* dst,
                            std::size_t n);
/// sum over i of (a[i] - b[i])^2.
using SumSqDiffFn = std::uint64_t (*)(const std::uint8_t* a, const std::uint8_t* b,
                                      std::size_t n);
/// counts[i] += (a[i] != b[i]).
using CountMismatchFn = void (*)(const char* a, const char* b, std::uint32_t* counts,
                                 std::size_t n);

struct KernelTable {
  const char* name;
  GfMulAddFn gf_mul_add;
  SumSqDiffFn sum_sq_diff_u8;
  CountMismatchFn count_mismatch;
};

const KernelTable& scalar();
/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2();

/// The table used by the library. Chosen on first use: the environment
/// variable DNASKEW_KERNELS=scalar|avx2 overrides CPU detection.
const KernelTable& active();
/// Returns false (and leaves the selection unchanged) for an unknown or
/// unsupported name.
bool select(std::string_view name);

}  // namespace dnaskew::kernels
