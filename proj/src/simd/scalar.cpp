#include "kernels_impl.hpp"

namespace oeprop::simd::detail {
namespace {

void rotate_pair_scalar(double* x, double* y, std::size_t n, double c, double s) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void axpy_scalar(double* y, const double* x, std::size_t n, double a) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void accumulate_squares_scalar(double* acc, const double* x, std::size_t n, double w) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = acc[i] + (w * x[i]) * x[i];
}

void three_term_scalar(double* out, const double* xi, const double* cur, const double* prev,
                       std::size_t n, double a, double b) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (a * xi[i]) * cur[i] - b * prev[i];
}

}  // namespace

const KernelTable kScalarTable{rotate_pair_scalar, axpy_scalar, accumulate_squares_scalar,
                               three_term_scalar};

}  // namespace oeprop::simd::detail
