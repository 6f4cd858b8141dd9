#include <atomic>
#include <cstdlib>
#include <string>

#include "cam/simd/kernels.hpp"

namespace cam::simd {

#if defined(CAM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(CAM_HAVE_NEON)
const KernelTable& neon_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(CAM_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#if defined(CAM_HAVE_NEON)
  return &neon_table();
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* best_available() {
  if (const KernelTable* t = avx2_kernels()) return t;
  if (const KernelTable* t = neon_kernels()) return t;
  return &scalar_kernels();
}

const KernelTable* by_name(std::string_view name) {
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") return avx2_kernels();
  if (name == "neon") return neon_kernels();
  if (name == "auto") return best_available();
  return nullptr;
}

const KernelTable* initial_selection() {
  if (const char* env = std::getenv("CAM_SIMD")) {
    if (const KernelTable* t = by_name(env)) return t;
  }
  return best_available();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> selected{initial_selection()};
  return selected;
}

}  // namespace

const KernelTable& active_kernels() { return *current().load(std::memory_order_acquire); }

bool select_kernels(std::string_view name) {
  const KernelTable* t = by_name(name);
  if (t == nullptr) return false;
  current().store(t, std::memory_order_release);
  return true;
}

}  // namespace cam::simd
