#include <immintrin.h>

#include "kernels_impl.hpp"

// Compiled with -mavx2 only. FMA is deliberately not enabled so that each lane
// rounds exactly like the scalar loop.
namespace oeprop::simd::detail {
namespace {

void rotate_pair_avx2(double* x, double* y, std::size_t n, double c, double s) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d yi = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_sub_pd(_mm256_mul_pd(vc, xi), _mm256_mul_pd(vs, yi)));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_mul_pd(vs, xi), _mm256_mul_pd(vc, yi)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void axpy_avx2(double* y, const double* x, std::size_t n, double a) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void accumulate_squares_avx2(double* acc, const double* x, std::size_t n, double w) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d sq = _mm256_mul_pd(_mm256_mul_pd(vw, xi), xi);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), sq));
  }
  for (; i < n; ++i) acc[i] = acc[i] + (w * x[i]) * x[i];
}

void three_term_avx2(double* out, const double* xi, const double* cur, const double* prev,
                     std::size_t n, double a, double b) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d lead = _mm256_mul_pd(_mm256_mul_pd(va, _mm256_loadu_pd(xi + i)),
                                       _mm256_loadu_pd(cur + i));
    const __m256d tail = _mm256_mul_pd(vb, _mm256_loadu_pd(prev + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(lead, tail));
  }
  for (; i < n; ++i) out[i] = (a * xi[i]) * cur[i] - b * prev[i];
}

}  // namespace

const KernelTable kAvx2Table{rotate_pair_avx2, axpy_avx2, accumulate_squares_avx2,
                             three_term_avx2};

}  // namespace oeprop::simd::detail
