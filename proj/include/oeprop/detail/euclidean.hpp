#pragma once

#include "oeprop/kernels.hpp"

namespace oeprop::kernels::detail {

// Everything the first-order amplitude needs at one (endpoints, time, omega),
// evaluated at (possibly complex) Euclidean time beta_E. Real time is
// beta_E = i*T. Derivatives are with respect to omega.
template <class S>
struct EuclideanTerms {
  S w0{};
  S dw0{};
  KernelIntegralsT<S> ints{};
  KernelIntegralsT<S> dints{};
};

template <class S>
EuclideanTerms<S> euclidean_terms(double x_a, double x_b, S beta_e, double omega,
                                  bool with_derivatives);

extern template EuclideanTerms<double> euclidean_terms<double>(double, double, double, double,
                                                               bool);
extern template EuclideanTerms<cplx> euclidean_terms<cplx>(double, double, cplx, double, bool);

/// Euclidean time for a real-time point: beta_E = i T. Validates the domain
/// (Re beta_E >= 0, and Im beta_E > 0 on the imaginary axis) and caustics.
cplx euclidean_time_from_real(cplx time, double omega);

}  // namespace oeprop::kernels::detail
