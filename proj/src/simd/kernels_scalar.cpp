#include <cmath>

#include "cam/simd/kernels.hpp"

namespace cam::simd {
namespace {

void axpy(std::size_t n, double alpha, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(std::size_t n, double alpha, double* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double dot(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void scatter_mul_add(std::size_t n, double alpha, const double* b, const std::int32_t* j,
                     const std::int32_t* r, double* out) {
  for (std::size_t k = 0; k < n; ++k) out[r[k]] += alpha * b[j[k]];
}

void gather_mul(std::size_t n, const double* src, const std::int32_t* s, const double* x,
                const std::int32_t* v, double* dst) {
  for (std::size_t k = 0; k < n; ++k) dst[k] = src[s[k]] * x[v[k]];
}

void flush_tiny(std::size_t n, double threshold, double* x) {
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(x[i]) < threshold) x[i] = 0.0;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", axpy, scale, dot, scatter_mul_add, gather_mul, flush_tiny};
  return table;
}

}  // namespace cam::simd
