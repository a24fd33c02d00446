#pragma once

#include <complex>

namespace oeprop::kernels {

using cplx = std::complex<double>;

/// Value and derivative with respect to B.
template <class S>
struct MomentValue {
  S value{};
  S derivative{};
};

/// Scaled hyperbolic moment
///
///     M(p, q, r; B) = sinh(B)^-r * Integral_0^B sinh(B-u)^p sinh(u)^q du
///
/// for 0 <= p, q <= 4 and max(p, q) <= r <= p + q, on the closed right half
/// plane Re B >= 0 (the integral runs along the straight segment 0 -> B).
///
/// Small |B| uses the Taylor series of the integrand (all coefficients
/// positive); larger |B| uses the exact expansion in q = exp(-B), in which every
/// term is bounded because r >= max(p, q). Both routes are exact up to
/// rounding; neither overflows for large Re B.
template <class S>
MomentValue<S> sinh_moment(int p, int q, int r, S B);

extern template MomentValue<double> sinh_moment<double>(int, int, int, double);
extern template MomentValue<cplx> sinh_moment<cplx>(int, int, int, cplx);

/// |B| at or below which the series route is used.
inline constexpr double kSeriesRadius = 2.0;

/// Hyperbolic helpers on Re B >= 0 that stay finite for large Re B.
/// log_sinh follows the branch continuous from B -> 0+ (on the imaginary axis
/// this is ln|sin| + i(pi/2 + pi*floor(Im B / pi)), i.e. it counts caustics).
template <class S>
struct Hyperbolic {
  S log_sinh{};
  S coth{};
  S csch{};
};

template <class S>
Hyperbolic<S> hyperbolic(S B);

extern template Hyperbolic<double> hyperbolic<double>(double);
extern template Hyperbolic<cplx> hyperbolic<cplx>(cplx);

}  // namespace oeprop::kernels
