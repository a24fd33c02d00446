#pragma once

#include <span>
#include <vector>

#include "oeprop/kernels.hpp"
#include "oeprop/observables.hpp"
#include "oeprop/oep.hpp"
#include "oeprop/oracle.hpp"
#include "oeprop/parallel.hpp"

namespace oeprop::thermo {

struct ThermoOptions {
  oep::OptimizerOptions optimizer{};
  double tol_quad = 1e-10;  // relative tolerance of the trace integrals
  double tail = 1e-12;      // integrand at +-X relative to its peak
  Parallelism parallel{};
  oracle::BasisOptions basis{};
};

struct PartitionFunction {
  double z = 0.0;
  double log_z = 0.0;
  double quad_error = 0.0;  // absolute, on z
  double half_width = 0.0;  // X of the integration domain [-X, X]
};

/// Starting half-width 3 max(1, (beta lambda)^(-1/4), (beta max(m2, 1))^(-1/2));
/// the lambda term is dropped when lambda = 0.
double initial_half_width(const OscillatorParams& params, double beta);

/// Z = integral dx exp(W1(x, x, beta; w*(x))) with w* optimized at every node.
PartitionFunction partition_function_oep(const OscillatorParams& params, double beta,
                                         const ThermoOptions& opts = {});

FreeEnergyResult free_energy_oep(const OscillatorParams& params, double beta,
                                 const ThermoOptions& opts = {});
FreeEnergyResult free_energy_oef(const OscillatorParams& params, double beta,
                                 const ThermoOptions& opts = {});
FreeEnergyResult free_energy_fk(const OscillatorParams& params, double beta,
                                const ThermoOptions& opts = {});
FreeEnergyResult free_energy_exact(const OscillatorParams& params, double beta,
                                   const ThermoOptions& opts = {});
FreeEnergyResult free_energy(Method method, const OscillatorParams& params, double beta,
                             const ThermoOptions& opts = {});

/// 201 uniform points over [-X, X], X as in partition_function_oep. The spacing is
/// halved (up to 4 times) while the trapezoid integral of the OEP density misses 1 by
/// more than 1e-8.
std::vector<double> default_density_grid(const OscillatorParams& params, double beta,
                                         const ThermoOptions& opts = {});

/// rho(x) = exp(W1(x, x, beta; w*(x))) / Z. An empty grid selects the default grid.
DensityProfile density_oep(const OscillatorParams& params, double beta,
                           std::span<const double> grid, const ThermoOptions& opts = {});
DensityProfile density_exact(const OscillatorParams& params, double beta,
                             std::span<const double> grid, const ThermoOptions& opts = {});
/// OEP or EXACT; FK has no density here.
DensityProfile density(Method method, const OscillatorParams& params, double beta,
                       std::span<const double> grid, const ThermoOptions& opts = {});

/// exp(W1(x_a, x_b, beta; w*(x_a, x_b))) / Z.
DensityMatrixEntry density_matrix_oep(const OscillatorParams& params, double beta, double x_a,
                                      double x_b, const ThermoOptions& opts = {});
/// Same with a precomputed partition function, for sweeps over many pairs.
DensityMatrixEntry density_matrix_oep(const OscillatorParams& params, double beta, double x_a,
                                      double x_b, const PartitionFunction& z,
                                      const ThermoOptions& opts = {});

}  // namespace oeprop::thermo
