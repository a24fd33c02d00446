#pragma once

#include <span>
#include <string_view>

// Elementwise double-precision kernels used by the spectral oracle.
//
// Every kernel has a portable scalar reference and, where the target allows,
// a vector variant picked once at runtime. The variants perform the same
// multiplications and additions in the same order per element (no FMA), so
// their outputs are bit-identical to the scalar reference.
namespace oeprop::simd {

enum class Level { Scalar, Avx2, Neon };

std::string_view level_name(Level level);

/// Best level supported by both the build and the running CPU.
Level detected_level();

/// Level currently used by the dispatching entry points below.
Level active_level();

/// Pin dispatch to `level` (clamped to what is available). Intended for tests
/// and benchmarking; not synchronized with concurrent kernel calls.
void force_level(Level level);
void reset_level();

struct KernelTable {
  // x <- c*x - s*y ; y <- s*x + c*y  (x, y the old values)
  void (*rotate_pair)(double* x, double* y, std::size_t n, double c, double s);
  // y <- y + a*x
  void (*axpy)(double* y, const double* x, std::size_t n, double a);
  // acc <- acc + (w*x)*x
  void (*accumulate_squares)(double* acc, const double* x, std::size_t n, double w);
  // out <- (a*xi)*cur - b*prev
  void (*three_term)(double* out, const double* xi, const double* cur, const double* prev,
                     std::size_t n, double a, double b);
};

const KernelTable& scalar_kernels();
const KernelTable& kernels_for(Level level);

void rotate_pair(std::span<double> x, std::span<double> y, double c, double s);
void axpy(std::span<double> y, std::span<const double> x, double a);
void accumulate_squares(std::span<double> acc, std::span<const double> x, double w);
void three_term(std::span<double> out, std::span<const double> xi, std::span<const double> cur,
                std::span<const double> prev, double a, double b);

}  // namespace oeprop::simd
