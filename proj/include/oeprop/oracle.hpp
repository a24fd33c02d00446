#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "oeprop/kernels.hpp"
#include "oeprop/observables.hpp"

// Exact reference spectrum of H = p^2/2 + m2 x^2/2 + lambda x^4 by
// diagonalization in the harmonic-oscillator basis of frequency Omega.
namespace oeprop::oracle {

struct JacobiResult {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // row i is the unit eigenvector of values[i]
  int sweeps = 0;
};

/// Cyclic Jacobi for a dense symmetric n x n matrix (row-major). Stops when the
/// off-diagonal Frobenius norm is below tol times the full norm; throws
/// ConvergenceError after max_sweeps.
JacobiResult jacobi_eigensystem(std::vector<double> a, std::size_t n, double tol = 1e-13,
                                int max_sweeps = 50);

struct SpectralSolution {
  OscillatorParams params;
  std::vector<double> energies;  // ascending, all N Ritz values
  std::size_t basis_size = 0;
  double basis_frequency = 0.0;
  // Row n (length N) holds the basis coefficients of level n.
  std::vector<double> eigenvectors;
  // Lowest levels trusted in thermal sums; higher Ritz values are basis artifacts.
  std::size_t reliable_levels = 0;
  int jacobi_sweeps = 0;

  std::span<const double> coefficients(std::size_t level) const {
    return {eigenvectors.data() + level * basis_size, basis_size};
  }
};

/// max(sqrt|m2|, (6 lambda)^(1/3)).
double default_basis_frequency(const OscillatorParams& params);

/// Semiclassical number of levels with energy below E.
double wkb_level_count(const OscillatorParams& params, double energy);

/// N x N Hamiltonian in the basis of frequency Omega (N >= 16, rounded up to
/// even). x^4 is the square of the x^2 band matrix built two sizes larger, so
/// every retained element is exact. Parity blocks are diagonalized separately.
SpectralSolution solve_spectrum(const OscillatorParams& params, std::size_t n, double omega);

struct BasisOptions {
  std::size_t basis_size = 128;  // lower bound; raised when beta needs more levels
  double basis_omega = 0.0;      // 0: default_basis_frequency
};

/// Chooses N so that the reliable levels reach 36/beta above the ground
/// state (semiclassical count), then solves.
SpectralSolution solve_spectrum_for(const OscillatorParams& params, double beta,
                                    const BasisOptions& opts = {});

/// f = E0 - ln(sum_n exp(-beta (E_n - E0))) / beta over the reliable levels.
/// Throws TruncationError unless exp(-beta (E_last - E0)) < 1e-14.
FreeEnergyResult exact_free_energy(const SpectralSolution& s, double beta);

/// Thermal density sum_n exp(-beta E_n) |psi_n(x)|^2 / Z with the
/// eigenfunctions from the Hermite-function recurrence. Throws RangeError when
/// sqrt(Omega) |x| exceeds 1e6, where one recurrence step could overflow.
DensityProfile exact_density(const SpectralSolution& s, double beta, std::span<const double> grid);

/// Thermal density matrix on grid x grid, row-major:
/// sum_n exp(-beta E_n) psi_n(x_i) psi_n(x_j) / Z.
std::vector<double> exact_density_matrix(const SpectralSolution& s, double beta,
                                         std::span<const double> grid);

/// Normalized Hermite functions phi_k(x), k < count, of frequency Omega;
/// row k (length grid.size()) of the returned table.
std::vector<double> hermite_functions(double omega, std::size_t count,
                                      std::span<const double> grid);

struct LevelExpectations {
  double kinetic = 0.0;  // <p^2/2>
  double x2 = 0.0;
  double x4 = 0.0;
};

/// Expectation values in level n with the same truncated operators as H.
LevelExpectations level_expectations(const SpectralSolution& s, std::size_t level);

}  // namespace oeprop::oracle
