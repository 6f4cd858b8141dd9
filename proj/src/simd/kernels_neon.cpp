// Only compiled on aarch64, where Advanced SIMD is architecturally guaranteed.

#include <arm_neon.h>

#include <cmath>

#include "cam/simd/kernels.hpp"

namespace cam::simd {
namespace {

void axpy(std::size_t n, double alpha, const double* x, double* y) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(a, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(std::size_t n, double alpha, double* x) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), a));
  for (; i < n; ++i) x[i] *= alpha;
}

double dot(std::size_t n, const double* x, const double* y) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  const float64x2_t acc = vaddq_f64(acc0, acc1);
  double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

// No gather/scatter on NEON: indexed loops stay scalar, lane pairs are
// multiplied together.
void scatter_mul_add(std::size_t n, double alpha, const double* b, const std::int32_t* j,
                     const std::int32_t* r, double* out) {
  for (std::size_t k = 0; k < n; ++k) out[r[k]] += alpha * b[j[k]];
}

void gather_mul(std::size_t n, const double* src, const std::int32_t* s, const double* x,
                const std::int32_t* v, double* dst) {
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const double lhs[2] = {src[s[k]], src[s[k + 1]]};
    const double rhs[2] = {x[v[k]], x[v[k + 1]]};
    vst1q_f64(dst + k, vmulq_f64(vld1q_f64(lhs), vld1q_f64(rhs)));
  }
  for (; k < n; ++k) dst[k] = src[s[k]] * x[v[k]];
}

void flush_tiny(std::size_t n, double threshold, double* x) {
  const float64x2_t thr = vdupq_n_f64(threshold);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t val = vld1q_f64(x + i);
    const uint64x2_t keep = vcgeq_f64(vabsq_f64(val), thr);
    vst1q_f64(x + i, vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(val), keep)));
  }
  for (; i < n; ++i) {
    if (std::fabs(x[i]) < threshold) x[i] = 0.0;
  }
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{"neon", axpy, scale, dot, scatter_mul_add, gather_mul, flush_tiny};
  return table;
}

}  // namespace cam::simd
