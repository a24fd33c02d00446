#pragma once

#include "oeprop/kernels.hpp"
#include "oeprop/observables.hpp"
#include "oeprop/oep.hpp"

// Optimized expansion of the free energy itself, first order, one global
// trial frequency per beta:
//   F(w) = w/2 + ln(1 - e^{-beta w})/beta + (m2 - w^2)/(2w) c + 3 lambda c^2 / w^2,
//   c = 1/2 + 1/(e^{beta w} - 1) = coth(beta w / 2) / 2.
namespace oeprop::oef {

double free_energy_at(const OscillatorParams& params, double beta, double omega);

/// dF/dw = (c - w c') [(w^2 - m2)/(2 w^2) - 6 lambda c / w^3],  c' = dc/dw < 0.
double gap_residual(const OscillatorParams& params, double beta, double omega);

/// Stationary frequency by the same policy as the amplitude optimizer.
oep::GapSolution optimize_omega(const OscillatorParams& params, double beta,
                                const oep::OptimizerOptions& opts = {});

FreeEnergyResult free_energy(const OscillatorParams& params, double beta,
                             const oep::OptimizerOptions& opts = {});

}  // namespace oeprop::oef
