#pragma once

#include <complex>
#include <optional>
#include <utility>

#include "oeprop/kernels.hpp"

// First-order optimized expansion of the propagation amplitude.
//
// Imaginary time:  (x_b, beta | x_a, 0) ~ exp(W1), with
//   W1 = W0 - (m2 - w^2)/2 (I_L2 + I_K) - lambda (I_L4 + 6 I_L2K + 3 I_KK).
// Real time:       (x_b, T | x_a, 0) ~ exp(i W1r); i*W1r is the continuation
//                  of W1 to beta = i T.
// The trial frequency w is fixed per endpoint pair by stationarity dW1/dw = 0.
namespace oeprop::oep {

using kernels::cplx;

struct GapSolution {
  double omega_star = 0.0;
  double residual = 0.0;   // |dW1/dw| at omega_star
  double tolerance = 0.0;  // acceptance threshold used for this solve
  int n_roots = 0;         // stationary points seen in the scan window
  std::pair<double, double> bracket{0.0, 0.0};
  bool fallback_used = false;  // no stationary point; minimal-|dW/dw| point returned
};

struct OptimizerOptions {
  double tol_root = 1e-10;
  int scan_points = 200;
  double window_decades = 2.0;  // scan [w_ref 10^-d, w_ref 10^d]
  int newton_steps = 3;
};

template <class T, class Point>
struct FirstOrderAmplitude {
  T w_value{};
  GapSolution gap;
  Point point;
};

using ImagAmplitude = FirstOrderAmplitude<double, EuclideanPoint>;
using RealAmplitude = FirstOrderAmplitude<cplx, RealTimePoint>;

/// Scale around which the trial frequency is searched:
/// max(sqrt|m2|, (6 lambda max(1, x_a^2 + x_b^2))^(1/3), 1/time).
double reference_frequency(const OscillatorParams& params, double x_a, double x_b, double time);

double w1_imag(const OscillatorParams& params, const EuclideanPoint& p, double omega);
cplx w1_real(const OscillatorParams& params, const RealTimePoint& p, double omega);
/// Real-time W1 at complex time (Im T <= 0); T = -i beta gives -i * w1_imag.
cplx w1_real_at(const OscillatorParams& params, double x_a, double x_b, cplx time, double omega);

/// dW1/dw, differentiated in closed form. Uses dW0/dw = -w (I_L2 + I_K), so
/// the residual is -(m2 - w^2)/2 d(I_L2 + I_K)/dw - lambda d(I_L4 + 6 I_L2K + 3 I_KK)/dw.
double gap_residual_imag(const OscillatorParams& params, const EuclideanPoint& p, double omega);
cplx gap_residual_real(const OscillatorParams& params, const RealTimePoint& p, double omega);
cplx gap_residual_real_at(const OscillatorParams& params, double x_a, double x_b, cplx time,
                          double omega);

/// Stationary trial frequency for an imaginary-time amplitude. Scans the
/// residual on a log grid, keeps the largest root, bisects it to 1e-12
/// relative width and polishes with Newton steps. Without a sign change it
/// falls back to the minimum of |dW1/dw| and sets fallback_used.
GapSolution optimize_omega_imag(const OscillatorParams& params, const EuclideanPoint& p,
                                const OptimizerOptions& opts = {});

/// Real trial frequency minimizing |dW1/dw|^2 for a real-time amplitude.
/// A complex W1 need not have a real stationary point; fallback_used reports
/// a minimum whose residual stays above tolerance. Grid points at caustics are
/// skipped.
GapSolution optimize_omega_real(const OscillatorParams& params, const RealTimePoint& p,
                                const OptimizerOptions& opts = {});
GapSolution optimize_omega_real_at(const OscillatorParams& params, double x_a, double x_b,
                                   cplx time, const OptimizerOptions& opts = {});

ImagAmplitude amplitude_imag(const OscillatorParams& params, const EuclideanPoint& p,
                             const OptimizerOptions& opts = {});
RealAmplitude amplitude_real(const OscillatorParams& params, const RealTimePoint& p,
                             const OptimizerOptions& opts = {});

}  // namespace oeprop::oep
