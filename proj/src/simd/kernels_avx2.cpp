// Compiled with -mavx2 only; callers reach these through avx2_kernels() after a
// runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "cam/simd/kernels.hpp"

namespace cam::simd {
namespace {

void axpy(std::size_t n, double alpha, const double* x, double* y) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d prod = _mm256_mul_pd(a, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(std::size_t n, double alpha, double* x) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), a));
  for (; i < n; ++i) x[i] *= alpha;
}

double dot(std::size_t n, const double* x, const double* y) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void scatter_mul_add(std::size_t n, double alpha, const double* b, const std::int32_t* j,
                     const std::int32_t* r, double* out) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  alignas(32) double lanes[4];
  for (; k + 4 <= n; k += 4) {
    const __m128i jv = _mm_loadu_si128(reinterpret_cast<const __m128i*>(j + k));
    const __m128i rv = _mm_loadu_si128(reinterpret_cast<const __m128i*>(r + k));
    const __m256d prod = _mm256_mul_pd(a, _mm256_i32gather_pd(b, jv, 8));
    _mm256_store_pd(lanes, _mm256_add_pd(_mm256_i32gather_pd(out, rv, 8), prod));
    out[r[k]] = lanes[0];
    out[r[k + 1]] = lanes[1];
    out[r[k + 2]] = lanes[2];
    out[r[k + 3]] = lanes[3];
  }
  for (; k < n; ++k) out[r[k]] += alpha * b[j[k]];
}

void gather_mul(std::size_t n, const double* src, const std::int32_t* s, const double* x,
                const std::int32_t* v, double* dst) {
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m128i sv = _mm_loadu_si128(reinterpret_cast<const __m128i*>(s + k));
    const __m128i vv = _mm_loadu_si128(reinterpret_cast<const __m128i*>(v + k));
    _mm256_storeu_pd(dst + k, _mm256_mul_pd(_mm256_i32gather_pd(src, sv, 8),
                                            _mm256_i32gather_pd(x, vv, 8)));
  }
  for (; k < n; ++k) dst[k] = src[s[k]] * x[v[k]];
}

void flush_tiny(std::size_t n, double threshold, double* x) {
  const __m256d thr = _mm256_set1_pd(threshold);
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d val = _mm256_loadu_pd(x + i);
    const __m256d keep = _mm256_cmp_pd(_mm256_and_pd(val, abs_mask), thr, _CMP_GE_OQ);
    _mm256_storeu_pd(x + i, _mm256_and_pd(val, keep));
  }
  for (; i < n; ++i) {
    if (std::fabs(x[i]) < threshold) x[i] = 0.0;
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", axpy, scale, dot, scatter_mul_add, gather_mul, flush_tiny};
  return table;
}

}  // namespace cam::simd
