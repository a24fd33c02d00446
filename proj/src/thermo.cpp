#include "oeprop/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oeprop/detail/trace.hpp"
#include "oeprop/errors.hpp"
#include "oeprop/fk.hpp"
#include "oeprop/oef.hpp"

namespace oeprop {
namespace detail {
namespace {

constexpr int kProbePoints = 65;
constexpr int kMaxDoublings = 30;

}  // namespace

LogIntegral integrate_log_weight(const std::function<double(double)>& log_w, double x0,
                                 double tail, const quad::Options& opts) {
  const double log_tail = std::log(tail);
  double x_max = x0;
  double peak = 0.0;
  for (int doubling = 0;; ++doubling) {
    const auto probe = parallel_map<double>(kProbePoints, opts.parallel, [&](std::size_t i) {
      return log_w(x_max * (2.0 * static_cast<double>(i) / (kProbePoints - 1) - 1.0));
    });
    peak = *std::max_element(probe.begin(), probe.end());
    const double edge = std::max(probe.front(), probe.back());
    if (!std::isfinite(peak)) throw QuadratureError("trace integrand is not finite");
    if (edge - peak < log_tail) break;
    if (doubling == kMaxDoublings) {
      throw QuadratureError("trace integrand does not decay; domain growth exhausted");
    }
    x_max *= 2.0;
  }
  const auto r = quad::integrate_or_throw(
      [&](double x) { return std::exp(log_w(x) - peak); }, -x_max, x_max, opts);
  LogIntegral out;
  out.log_value = peak + std::log(r.value);
  out.rel_error = r.error / r.value;
  out.half_width = x_max;
  out.log_peak = peak;
  return out;
}

}  // namespace detail

namespace thermo {
namespace {

void check_beta(double beta) {
  if (!(std::isfinite(beta) && beta > 0.0)) throw DomainError("beta must be positive and finite");
}

quad::Options quad_options(const ThermoOptions& opts) {
  if (!(opts.tol_quad > 0.0)) throw DomainError("quadrature tolerance must be positive");
  quad::Options q;
  q.rel_tol = opts.tol_quad;
  q.abs_tol = 1e-3 * opts.tol_quad;  // integrand peak is scaled to 1
  q.parallel = opts.parallel;
  return q;
}

double log_diagonal(const OscillatorParams& params, double beta, double x,
                    const ThermoOptions& opts) {
  return oep::amplitude_imag(params, {x, x, beta}, opts.optimizer).w_value;
}

}  // namespace

double initial_half_width(const OscillatorParams& params, double beta) {
  check_beta(beta);
  const double quartic = params.lambda > 0.0 ? std::pow(beta * params.lambda, -0.25) : 0.0;
  return 3.0 * std::max({1.0, quartic, 1.0 / std::sqrt(beta * std::max(params.m2, 1.0))});
}

PartitionFunction partition_function_oep(const OscillatorParams& params, double beta,
                                         const ThermoOptions& opts) {
  params.validate();
  check_beta(beta);
  const auto li = detail::integrate_log_weight(
      [&](double x) { return log_diagonal(params, beta, x, opts); },
      initial_half_width(params, beta), opts.tail, quad_options(opts));
  PartitionFunction z;
  z.log_z = li.log_value;
  z.z = std::exp(li.log_value);
  z.quad_error = li.rel_error * z.z;
  z.half_width = li.half_width;
  return z;
}

FreeEnergyResult free_energy_oep(const OscillatorParams& params, double beta,
                                 const ThermoOptions& opts) {
  const PartitionFunction z = partition_function_oep(params, beta, opts);
  FreeEnergyResult r;
  r.beta = beta;
  r.method = Method::OEP;
  r.f = -z.log_z / beta;
  r.err_est = z.quad_error / z.z / beta;
  r.omega_diag = oep::optimize_omega_imag(params, {0.0, 0.0, beta}, opts.optimizer).omega_star;
  return r;
}

FreeEnergyResult free_energy_oef(const OscillatorParams& params, double beta,
                                 const ThermoOptions& opts) {
  return oef::free_energy(params, beta, opts.optimizer);
}

FreeEnergyResult free_energy_fk(const OscillatorParams& params, double beta,
                                const ThermoOptions& opts) {
  return fk::free_energy(params, beta, quad_options(opts));
}

FreeEnergyResult free_energy_exact(const OscillatorParams& params, double beta,
                                   const ThermoOptions& opts) {
  const auto s = oracle::solve_spectrum_for(params, beta, opts.basis);
  return oracle::exact_free_energy(s, beta);
}

FreeEnergyResult free_energy(Method method, const OscillatorParams& params, double beta,
                             const ThermoOptions& opts) {
  switch (method) {
    case Method::EXACT: return free_energy_exact(params, beta, opts);
    case Method::FK: return free_energy_fk(params, beta, opts);
    case Method::OEF: return free_energy_oef(params, beta, opts);
    case Method::OEP: return free_energy_oep(params, beta, opts);
  }
  throw DomainError("unknown method");
}

namespace {

std::vector<double> uniform_grid(double half_width) {
  constexpr int kPoints = 201;
  std::vector<double> g(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    g[static_cast<std::size_t>(i)] = half_width * (2.0 * i / (kPoints - 1) - 1.0);
  }
  return g;
}

void check_grid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw DomainError("position grid must be finite and strictly increasing");
    }
  }
}

DensityProfile oep_profile(const OscillatorParams& params, double beta,
                           std::vector<double> grid, const PartitionFunction& z,
                           const ThermoOptions& opts) {
  DensityProfile out;
  out.beta = beta;
  out.rho = parallel_map<double>(grid.size(), opts.parallel, [&](std::size_t i) {
    return std::exp(log_diagonal(params, beta, grid[i], opts) - z.log_z);
  });
  out.grid = std::move(grid);
  out.normalization_error = std::abs(trapezoid(out.grid, out.rho) - 1.0);
  return out;
}

// The OEP density has a jump in its second derivative where a finite stationary
// frequency branches off w -> 0 (double well), so the trapezoid error on a
// uniform grid only falls like h^3. Halve the spacing, reusing computed nodes,
// until the grid integrates the density to kNormalization.
constexpr double kNormalization = 1e-8;
constexpr int kMaxRefinements = 4;

DensityProfile oep_default_profile(const OscillatorParams& params, double beta,
                                   const PartitionFunction& z, const ThermoOptions& opts) {
  DensityProfile out = oep_profile(params, beta, uniform_grid(z.half_width), z, opts);
  for (int level = 0; level < kMaxRefinements && out.normalization_error > kNormalization;
       ++level) {
    const std::size_t n = out.grid.size();
    std::vector<double> mid(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      mid[i] = z.half_width * (2.0 * (2.0 * i + 1.0) / (2.0 * (n - 1)) - 1.0);
    }
    const DensityProfile fill = oep_profile(params, beta, mid, z, opts);
    std::vector<double> grid(2 * n - 1), rho(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      grid[2 * i] = out.grid[i];
      rho[2 * i] = out.rho[i];
      if (i + 1 < n) {
        grid[2 * i + 1] = fill.grid[i];
        rho[2 * i + 1] = fill.rho[i];
      }
    }
    out.grid = std::move(grid);
    out.rho = std::move(rho);
    out.normalization_error = std::abs(trapezoid(out.grid, out.rho) - 1.0);
  }
  return out;
}

}  // namespace

std::vector<double> default_density_grid(const OscillatorParams& params, double beta,
                                         const ThermoOptions& opts) {
  const PartitionFunction z = partition_function_oep(params, beta, opts);
  return oep_default_profile(params, beta, z, opts).grid;
}

DensityProfile density_oep(const OscillatorParams& params, double beta,
                           std::span<const double> grid, const ThermoOptions& opts) {
  check_grid(grid);
  const PartitionFunction z = partition_function_oep(params, beta, opts);
  if (grid.empty()) return oep_default_profile(params, beta, z, opts);
  return oep_profile(params, beta, std::vector<double>(grid.begin(), grid.end()), z, opts);
}

DensityProfile density_exact(const OscillatorParams& params, double beta,
                             std::span<const double> grid, const ThermoOptions& opts) {
  check_grid(grid);
  std::vector<double> g = grid.empty() ? default_density_grid(params, beta, opts)
                                       : std::vector<double>(grid.begin(), grid.end());
  const auto s = oracle::solve_spectrum_for(params, beta, opts.basis);
  return oracle::exact_density(s, beta, g);
}

DensityProfile density(Method method, const OscillatorParams& params, double beta,
                       std::span<const double> grid, const ThermoOptions& opts) {
  switch (method) {
    case Method::OEP: return density_oep(params, beta, grid, opts);
    case Method::EXACT: return density_exact(params, beta, grid, opts);
    default: break;
  }
  throw DomainError("density is available for OEP and EXACT only");
}

DensityMatrixEntry density_matrix_oep(const OscillatorParams& params, double beta, double x_a,
                                      double x_b, const PartitionFunction& z,
                                      const ThermoOptions& opts) {
  const auto amp = oep::amplitude_imag(params, {x_a, x_b, beta}, opts.optimizer);
  DensityMatrixEntry e;
  e.x_a = x_a;
  e.x_b = x_b;
  e.beta = beta;
  e.value = std::exp(amp.w_value - z.log_z);
  return e;
}

DensityMatrixEntry density_matrix_oep(const OscillatorParams& params, double beta, double x_a,
                                      double x_b, const ThermoOptions& opts) {
  return density_matrix_oep(params, beta, x_a, x_b, partition_function_oep(params, beta, opts),
                            opts);
}

}  // namespace thermo
}  // namespace oeprop
