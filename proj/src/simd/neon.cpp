#include <arm_neon.h>

#include "kernels_impl.hpp"

// vmulq/vaddq/vsubq only; vfmaq would change rounding relative to scalar.
namespace oeprop::simd::detail {
namespace {

void rotate_pair_neon(double* x, double* y, std::size_t n, double c, double s) {
  const float64x2_t vc = vdupq_n_f64(c);
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xi = vld1q_f64(x + i);
    const float64x2_t yi = vld1q_f64(y + i);
    vst1q_f64(x + i, vsubq_f64(vmulq_f64(vc, xi), vmulq_f64(vs, yi)));
    vst1q_f64(y + i, vaddq_f64(vmulq_f64(vs, xi), vmulq_f64(vc, yi)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void axpy_neon(double* y, const double* x, std::size_t n, double a) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void accumulate_squares_neon(double* acc, const double* x, std::size_t n, double w) {
  const float64x2_t vw = vdupq_n_f64(w);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xi = vld1q_f64(x + i);
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vmulq_f64(vmulq_f64(vw, xi), xi)));
  }
  for (; i < n; ++i) acc[i] = acc[i] + (w * x[i]) * x[i];
}

void three_term_neon(double* out, const double* xi, const double* cur, const double* prev,
                     std::size_t n, double a, double b) {
  const float64x2_t va = vdupq_n_f64(a);
  const float64x2_t vb = vdupq_n_f64(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t lead = vmulq_f64(vmulq_f64(va, vld1q_f64(xi + i)), vld1q_f64(cur + i));
    vst1q_f64(out + i, vsubq_f64(lead, vmulq_f64(vb, vld1q_f64(prev + i))));
  }
  for (; i < n; ++i) out[i] = (a * xi[i]) * cur[i] - b * prev[i];
}

}  // namespace

const KernelTable kNeonTable{rotate_pair_neon, axpy_neon, accumulate_squares_neon,
                             three_term_neon};

}  // namespace oeprop::simd::detail
