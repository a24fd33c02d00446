#pragma once

#include "oeprop/kernels.hpp"
#include "oeprop/observables.hpp"
#include "oeprop/quadrature.hpp"

// Feynman-Kleinert first-order effective classical potential for
// V(x) = m2 x^2 / 2 + lambda x^4:
//
//   V_cl(x0) = ln(sinh y / y)/beta - Omega^2 a^2 / 2 + V_a2(x0),   y = beta Omega / 2,
//   V_a2(x0) = m2 (x0^2 + a^2)/2 + lambda (x0^4 + 6 x0^2 a^2 + 3 a^4)   (Gaussian smearing),
//   a^2      = (y coth y - 1) / (beta Omega^2),
//
// with Omega^2(x0) fixed by minimizing V_cl, i.e. Omega^2 = m2 + 12 lambda (x0^2 + a^2).
// Omega^2 may be negative (down to -(2 pi / beta)^2) near a double-well
// barrier; coth and sinh continue to cot and sin there.
namespace oeprop::fk {

/// a^2 as a function of Omega^2 > -(2 pi / beta)^2.
double smearing_width(double omega2, double beta);

struct EffectivePotential {
  double v_cl = 0.0;
  double omega2 = 0.0;
  double a2 = 0.0;
};

EffectivePotential effective_potential(const OscillatorParams& params, double x0, double beta);

/// f = -ln Z / beta,  Z = integral dx0 / sqrt(2 pi beta) exp(-beta V_cl(x0)).
FreeEnergyResult free_energy(const OscillatorParams& params, double beta,
                             const quad::Options& opts = {});

}  // namespace oeprop::fk
