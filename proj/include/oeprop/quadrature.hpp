#pragma once

#include <functional>

#include "oeprop/parallel.hpp"

namespace oeprop::quad {

struct Options {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_depth = 40;
  /// Hard cap on the number of panels alive at once; guards runaway refinement.
  std::size_t max_panels = 1 << 16;
  Parallelism parallel{};
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (7/15) on [a, b].
///
/// Refinement is level-synchronous: all panels of one bisection level are
/// evaluated together (optionally in parallel), panels whose Kronrod error
/// exceeds their share of the tolerance are split, the rest are accepted. The
/// final sum is a pairwise sum over panels ordered by position, so the result
/// is independent of the thread count.
///
/// Does not throw on non-convergence; check `converged` and `error`.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts = {});

/// Same as integrate() but throws QuadratureError carrying the achieved
/// error estimate when the tolerance is not met.
Result integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const Options& opts = {});

}  // namespace oeprop::quad
