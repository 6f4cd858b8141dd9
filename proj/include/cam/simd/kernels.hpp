#pragma once

// Data-parallel inner loops of the DA engine. Every kernel has a scalar
// reference implementation; vector variants are compiled in separate
// translation units and picked at runtime. Elementwise kernels round exactly
// like the scalar reference (no FMA contraction); only `dot` may differ, by
// summation order.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace cam::simd {

struct KernelTable {
  const char* name;

  // y[i] += alpha * x[i]
  void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
  // x[i] *= alpha
  void (*scale)(std::size_t n, double alpha, double* x);
  // sum_i x[i] * y[i]
  double (*dot)(std::size_t n, const double* x, const double* y);
  // out[r[k]] += alpha * b[j[k]]; the r[k] must be pairwise distinct.
  void (*scatter_mul_add)(std::size_t n, double alpha, const double* b, const std::int32_t* j,
                          const std::int32_t* r, double* out);
  // dst[k] = src[s[k]] * x[v[k]]
  void (*gather_mul)(std::size_t n, const double* src, const std::int32_t* s, const double* x,
                     const std::int32_t* v, double* dst);
  // x[i] = 0 where |x[i]| < threshold
  void (*flush_tiny)(std::size_t n, double threshold, double* x);
};

const KernelTable& scalar_kernels();

// nullptr when the variant is not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Kernels used by the library. Defaults to the widest supported variant; the
// CAM_SIMD environment variable ("scalar", "avx2", "neon") overrides it.
const KernelTable& active_kernels();

// Forces a variant by name ("auto" restores the default). Returns false when
// the requested variant is unavailable, leaving the selection unchanged.
bool select_kernels(std::string_view name);

}  // namespace cam::simd
