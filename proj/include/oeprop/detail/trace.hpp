#pragma once

#include <functional>

#include "oeprop/quadrature.hpp"

namespace oeprop::detail {

struct LogIntegral {
  double log_value = 0.0;   // ln of the integral
  double rel_error = 0.0;   // quadrature error relative to the integral
  double half_width = 0.0;  // final X of the domain [-X, X]
  double log_peak = 0.0;    // largest log weight seen on the probe grid
};

/// ln of the integral of exp(log_w(x)) over the real line. Starts on [-X0, X0]
/// and doubles X until exp(log_w(+-X)) falls below `tail` times the peak on a
/// probe grid, then integrates exp(log_w - peak) adaptively.
LogIntegral integrate_log_weight(const std::function<double(double)>& log_w, double x0,
                                 double tail, const quad::Options& opts);

}  // namespace oeprop::detail
