#include <atomic>
#include <cstdlib>
#include <string>

#include "dnaskew/kernels.hpp"

namespace dnaskew::kernels {

#if defined(DNASKEW_HAVE_AVX2_TU)
const KernelTable& avx2_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(DNASKEW_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* initial() {
  if (const char* env = std::getenv("DNASKEW_KERNELS")) {
    const std::string want(env);
    if (want == "scalar") return &scalar();
    if (want == "avx2" && avx2() != nullptr) return avx2();
  }
  if (const KernelTable* t = avx2()) return t;
  return &scalar();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{initial()};
  return ptr;
}

}  // namespace

const KernelTable* avx2() {
#if defined(DNASKEW_HAVE_AVX2_TU)
  static const bool ok = cpu_has_avx2();
  return ok ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  if (name == "scalar") {
    current().store(&scalar(), std::memory_order_release);
    return true;
  }
  if (name == "avx2" && avx2() != nullptr) {
    current().store(avx2(), std::memory_order_release);
    return true;
  }
  return false;
}

}  // namespace dnaskew::kernels
