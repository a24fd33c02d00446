#pragma once

#include <complex>

#include "oeprop/moments.hpp"
#include "oeprop/quadrature.hpp"

// Harmonic trial-oscillator building blocks of the first-order expansion.
//
// Conventions used throughout the library:
//   * The classical harmonic path runs L(0) = x_a, L(beta) = x_b.
//   * Imaginary-time quantities are real; real-time quantities are the
//     analytic continuation beta -> i*T of the same functions.
//   * Real-time integrals use the trigonometric path functions
//       Lr(t) = [x_a sin w(T-t) + x_b sin wt] / sin wT
//       Kr(t) = sin wt sin w(T-t) / (w sin wT)
//     and are related to the Euclidean integrals at beta_E = i*T by
//       I_L2 = i R_L2,  I_K = -R_K,  I_L4 = i R_L4,  I_L2K = -R_L2K,  I_KK = -i R_KK.
namespace oeprop {

struct OscillatorParams {
  double m2 = 1.0;      // mass squared; negative for the double well
  double lambda = 0.0;  // quartic coupling

  /// Throws DomainError unless lambda >= 0, both finite, and m2 > 0 when lambda == 0.
  void validate() const;
};

struct EuclideanPoint {
  double x_a = 0.0;
  double x_b = 0.0;
  double beta = 1.0;

  void validate() const;
};

struct RealTimePoint {
  double x_a = 0.0;
  double x_b = 0.0;
  double time = 1.0;

  void validate() const;
};

namespace kernels {

template <class T>
struct KernelIntegralsT {
  T l2{};   // Integral L^2
  T k{};    // Integral K
  T l4{};   // Integral L^4
  T l2k{};  // Integral L^2 K
  T kk{};   // Integral K^2
};

using KernelIntegrals = KernelIntegralsT<double>;
using ComplexKernelIntegrals = KernelIntegralsT<cplx>;

/// |sin(omega T)| (or |sinh(omega beta_E)| for complex time) below which the
/// real-time harmonic amplitude is treated as singular.
inline constexpr double kCausticTolerance = 1e-8;

double path_L(double x_a, double x_b, double t, double omega, double beta);
double path_K(double t, double omega, double beta);

/// Closed-form imaginary-time kernel integrals over [0, beta].
KernelIntegrals kernel_integrals_imag(const EuclideanPoint& p, double omega);

struct KernelQuadrature {
  KernelIntegrals values;
  KernelIntegrals errors;
};

/// The same five integrals by adaptive quadrature of path_L / path_K. Used to
/// cross-check the closed forms; throws QuadratureError on non-convergence.
KernelQuadrature kernel_integrals_imag_quadrature(const EuclideanPoint& p, double omega,
                                                  const quad::Options& opts = {});

/// Closed-form real-time integrals of Lr, Kr over [0, T].
ComplexKernelIntegrals kernel_integrals_real(const RealTimePoint& p, double omega);

/// Real-time integrals at complex time T (Im T <= 0), integrating along the
/// segment 0 -> T. T = -i beta reproduces the imaginary-time integrals under
/// the map documented above.
ComplexKernelIntegrals kernel_integrals_real_at(double x_a, double x_b, cplx time, double omega);

ComplexKernelIntegrals euclidean_from_real(const ComplexKernelIntegrals& real);
ComplexKernelIntegrals real_from_euclidean(const ComplexKernelIntegrals& euclidean);

/// Log of the exact harmonic Euclidean amplitude at frequency omega:
///   1/2 ln(w / (2 pi sinh wb)) - w [(x_a^2 + x_b^2) cosh wb - 2 x_a x_b] / (2 sinh wb).
double w0_imag(const EuclideanPoint& p, double omega);

/// Harmonic real-time phase W0 with amplitude = exp(i W0). The log-amplitude
/// i*W0 follows the branch continuous from T -> 0+, which includes the phase
/// -i pi/2 for every caustic passed. Throws CausticError near w T = k pi.
cplx w0_real(const RealTimePoint& p, double omega);
cplx w0_real_at(double x_a, double x_b, cplx time, double omega);

/// True when the harmonic amplitude at (omega, complex time) is singular.
bool near_caustic(cplx time, double omega);

}  // namespace kernels
}  // namespace oeprop
