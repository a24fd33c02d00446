#include "oeprop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <sstream>

#include "oeprop/errors.hpp"
#include "oeprop/quadrature.hpp"
#include "oeprop/simd.hpp"

namespace oeprop::oracle {
namespace {

constexpr double kTailBound = 1e-14;
constexpr double kTailDepth = 36.0;  // -ln(kTailBound) = 32.2, plus margin

// Band matrix of x^2 in the oscillator basis, size k.
struct X2Band {
  std::vector<double> diag;  // (x^2)_{n,n}
  std::vector<double> off2;  // (x^2)_{n,n+2}
};

X2Band x2_band(std::size_t k, double omega) {
  X2Band b;
  b.diag.resize(k);
  b.off2.assign(k, 0.0);
  for (std::size_t n = 0; n < k; ++n) {
    const double nd = static_cast<double>(n);
    b.diag[n] = (2.0 * nd + 1.0) / (2.0 * omega);
    if (n + 2 < k) b.off2[n] = std::sqrt((nd + 1.0) * (nd + 2.0)) / (2.0 * omega);
  }
  return b;
}

double x2_at(const X2Band& b, std::size_t i, std::size_t j) {
  if (i == j) return b.diag[i];
  if (j == i + 2) return b.off2[i];
  if (i == j + 2) return b.off2[j];
  return 0.0;
}

// (x^4)_{ij} = sum_k (x^2)_{ik} (x^2)_{kj}; exact when b covers i + 2.
double x4_at(const X2Band& b, std::size_t i, std::size_t j) {
  double s = 0.0;
  const std::size_t lo = i >= 2 ? i - 2 : 0;
  for (std::size_t k = lo; k <= i + 2 && k < b.diag.size(); ++k) {
    s += x2_at(b, i, k) * x2_at(b, k, j);
  }
  return s;
}

double p2_at(std::size_t i, std::size_t j, double omega) {
  const double nd = static_cast<double>(std::min(i, j));
  if (i == j) return omega * (2.0 * nd + 1.0) / 2.0;
  if (i + 2 == j || j + 2 == i) return -omega * std::sqrt((nd + 1.0) * (nd + 2.0)) / 2.0;
  return 0.0;
}

double hamiltonian_at(const OscillatorParams& params, const X2Band& b, double omega,
                      std::size_t i, std::size_t j) {
  double h = 0.5 * (params.m2 - omega * omega) * x2_at(b, i, j) + params.lambda * x4_at(b, i, j);
  if (i == j) h += omega * (static_cast<double>(i) + 0.5);
  return h;
}

double potential_minimum(const OscillatorParams& p) {
  if (p.m2 >= 0.0) return 0.0;
  return -p.m2 * p.m2 / (16.0 * p.lambda);
}

}  // namespace

JacobiResult jacobi_eigensystem(std::vector<double> a, std::size_t n, double tol, int max_sweeps) {
  if (a.size() != n * n) throw DomainError("jacobi_eigensystem: matrix size mismatch");
  std::vector<double> v(n * n, 0.0);  // rows are eigenvectors
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double full = 0.0;
  for (double x : a) full += x * x;
  full = std::sqrt(full);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
    }
    return std::sqrt(2.0 * s);
  };

  const auto& kt = simd::kernels_for(simd::active_level());
  int sweep = 0;
  while (off_norm() > tol * full) {
    if (sweep == max_sweeps) {
      std::ostringstream msg;
      msg << "Jacobi eigensolver not converged after " << max_sweeps << " sweeps (n = " << n << ")";
      throw ConvergenceError(msg.str());
    }
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) <= 1e-300 || std::abs(apq) < 1e-18 * full) continue;
        const double app = a[p * n + p];
        const double aqq = a[q * n + q];
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Rows p, q are contiguous; symmetry restores the matching columns.
        kt.rotate_pair(&a[p * n], &a[q * n], n, c, s);
        for (std::size_t k = 0; k < n; ++k) {
          a[k * n + p] = a[p * n + k];
          a[k * n + q] = a[q * n + k];
        }
        a[p * n + p] = app - t * apq;
        a[q * n + q] = aqq + t * apq;
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        kt.rotate_pair(&v[p * n], &v[q * n], n, c, s);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a[i * n + i] < a[j * n + j]; });
  JacobiResult r;
  r.sweeps = sweep;
  r.values.resize(n);
  r.vectors.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    r.values[i] = a[order[i] * n + order[i]];
    std::copy_n(&v[order[i] * n], n, &r.vectors[i * n]);
  }
  return r;
}

double default_basis_frequency(const OscillatorParams& params) {
  return std::max(std::sqrt(std::abs(params.m2)), std::cbrt(6.0 * params.lambda));
}

double wkb_level_count(const OscillatorParams& params, double energy) {
  params.validate();
  if (energy <= potential_minimum(params)) return 0.0;
  double xt2;  // outer turning point squared
  if (params.lambda == 0.0) {
    xt2 = 2.0 * energy / params.m2;
  } else {
    const double h = 0.25 * params.m2;
    xt2 = (-h + std::sqrt(h * h + params.lambda * energy)) / params.lambda;
  }
  const double xt = std::sqrt(xt2);
  quad::Options opts;
  opts.abs_tol = 1e-6;
  opts.rel_tol = 1e-6;
  const auto r = quad::integrate(
      [&](double x) {
        const double v = 0.5 * params.m2 * x * x + params.lambda * x * x * x * x;
        return energy > v ? std::sqrt(2.0 * (energy - v)) : 0.0;
      },
      0.0, xt, opts);
  return 2.0 * r.value / std::numbers::pi + 0.5;
}

SpectralSolution solve_spectrum(const OscillatorParams& params, std::size_t n, double omega) {
  params.validate();
  if (n < 16) throw DomainError("basis size must be at least 16");
  if (!(std::isfinite(omega) && omega > 0.0)) throw DomainError("basis frequency must be positive");
  n += n % 2;

  const X2Band band = x2_band(n + 2, omega);
  SpectralSolution s;
  s.params = params;
  s.basis_size = n;
  s.basis_frequency = omega;

  struct Level {
    double energy;
    std::vector<double> coeffs;
  };
  std::vector<Level> levels;
  levels.reserve(n);
  for (std::size_t parity = 0; parity < 2; ++parity) {
    const std::size_t m = n / 2;
    std::vector<double> h(m * m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        h[i * m + j] = hamiltonian_at(params, band, omega, 2 * i + parity, 2 * j + parity);
      }
    }
    const JacobiResult jr = jacobi_eigensystem(std::move(h), m);
    s.jacobi_sweeps = std::max(s.jacobi_sweeps, jr.sweeps);
    for (std::size_t k = 0; k < m; ++k) {
      Level lv{jr.values[k], std::vector<double>(n, 0.0)};
      for (std::size_t i = 0; i < m; ++i) lv.coeffs[2 * i + parity] = jr.vectors[k * m + i];
      levels.push_back(std::move(lv));
    }
  }
  std::stable_sort(levels.begin(), levels.end(),
                   [](const Level& a, const Level& b) { return a.energy < b.energy; });
  s.energies.resize(n);
  s.eigenvectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    s.energies[k] = levels[k].energy;
    std::copy(levels[k].coeffs.begin(), levels[k].coeffs.end(), &s.eigenvectors[k * n]);
  }
  s.reliable_levels = n / 2;
  return s;
}

SpectralSolution solve_spectrum_for(const OscillatorParams& params, double beta,
                                    const BasisOptions& opts) {
  params.validate();
  if (!(std::isfinite(beta) && beta > 0.0)) throw DomainError("beta must be positive and finite");
  const double omega = opts.basis_omega > 0.0 ? opts.basis_omega : default_basis_frequency(params);

  auto size_for = [&](double e0) {
    const double count = wkb_level_count(params, e0 + kTailDepth / beta);
    return std::max<std::size_t>(opts.basis_size, 2 * static_cast<std::size_t>(std::ceil(count)) + 16);
  };
  // Ground-state guess from a small basis, then size for the thermal window.
  const SpectralSolution probe = solve_spectrum(params, 32, omega);
  SpectralSolution s = solve_spectrum(params, size_for(probe.energies[0]), omega);
  const double top = s.energies[s.reliable_levels - 1] - s.energies[0];
  if (std::exp(-beta * top) >= kTailBound) {
    s = solve_spectrum(params, s.basis_size + s.basis_size / 2, omega);
  }
  return s;
}

namespace {

struct Boltzmann {
  std::vector<double> weights;  // exp(-beta (E_n - E0)) / sum, reliable levels
  double log_sum = 0.0;
  double tail = 0.0;
};

Boltzmann boltzmann(const SpectralSolution& s, double beta) {
  if (!(std::isfinite(beta) && beta > 0.0)) throw DomainError("beta must be positive and finite");
  const std::size_t r = s.reliable_levels;
  const double e0 = s.energies[0];
  Boltzmann b;
  b.tail = std::exp(-beta * (s.energies[r - 1] - e0));
  if (!(b.tail < kTailBound)) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "spectral sum truncated: exp(-beta (E_" << r - 1 << " - E_0)) = " << b.tail
        << " at beta = " << beta << " with N = " << s.basis_size;
    throw TruncationError(msg.str());
  }
  b.weights.resize(r);
  for (std::size_t n = 0; n < r; ++n) b.weights[n] = std::exp(-beta * (s.energies[n] - e0));
  const double sum = pairwise_sum(b.weights);
  for (double& w : b.weights) w /= sum;
  b.log_sum = std::log(sum);
  return b;
}

}  // namespace

FreeEnergyResult exact_free_energy(const SpectralSolution& s, double beta) {
  const Boltzmann b = boltzmann(s, beta);
  FreeEnergyResult r;
  r.beta = beta;
  r.method = Method::EXACT;
  r.f = s.energies[0] - b.log_sum / beta;
  r.omega_diag = s.energies[0];
  r.err_est = b.tail * static_cast<double>(s.basis_size) / beta;
  return r;
}

std::vector<double> hermite_functions(double omega, std::size_t count,
                                      std::span<const double> grid) {
  // Recurrence on rescaled values phi_k = h_k exp(log_scale): h_0 = 1 and
  // log_scale starts at ln norm - xi^2/2, so far tails neither underflow nor
  // overflow. Rows are exponentiated on output.
  constexpr double kBig = 1e150;
  constexpr double kMaxXi = 1e6;  // one recurrence step grows by at most ~1.5e6
  const std::size_t g = grid.size();
  const double scale = std::sqrt(omega);
  const double log_norm = 0.25 * std::log(omega / std::numbers::pi);
  std::vector<double> xi(g), log_scale(g);
  for (std::size_t i = 0; i < g; ++i) {
    xi[i] = scale * grid[i];
    if (!(std::abs(xi[i]) <= kMaxXi)) {
      std::ostringstream msg;
      msg << "Hermite recurrence out of range at x = " << grid[i];
      throw RangeError(msg.str());
    }
    log_scale[i] = log_norm - 0.5 * xi[i] * xi[i];
  }

  std::vector<double> table(count * g, 0.0);
  std::vector<double> prev(g, 0.0), cur(g, 1.0), next(g);
  auto emit = [&](std::size_t k) {
    double* row = &table[k * g];
    for (std::size_t i = 0; i < g; ++i) {
      if (cur[i] != 0.0) {
        row[i] = std::copysign(std::exp(std::log(std::abs(cur[i])) + log_scale[i]), cur[i]);
      }
    }
  };
  const auto& kt = simd::kernels_for(simd::active_level());
  for (std::size_t k = 0; k < count; ++k) {
    emit(k);
    if (k + 1 == count) break;
    const double kd = static_cast<double>(k);
    kt.three_term(next.data(), xi.data(), cur.data(), prev.data(), g, std::sqrt(2.0 / (kd + 1.0)),
                  std::sqrt(kd / (kd + 1.0)));
    std::swap(prev, cur);
    std::swap(cur, next);
    for (std::size_t i = 0; i < g; ++i) {
      if (std::abs(cur[i]) > kBig) {
        cur[i] /= kBig;
        prev[i] /= kBig;
        log_scale[i] += std::log(kBig);
      }
    }
  }
  return table;
}

namespace {

// Rows of psi_n on the grid for the levels carrying Boltzmann weight.
std::vector<double> level_functions(const SpectralSolution& s, std::size_t levels,
                                    std::span<const double> grid) {
  const std::size_t n = s.basis_size;
  const std::size_t g = grid.size();
  const std::vector<double> phi = hermite_functions(s.basis_frequency, n, grid);
  const auto& kt = simd::kernels_for(simd::active_level());
  std::vector<double> psi(levels * g, 0.0);
  for (std::size_t level = 0; level < levels; ++level) {
    const auto c = s.coefficients(level);
    for (std::size_t k = 0; k < n; ++k) {
      if (c[k] != 0.0) kt.axpy(&psi[level * g], &phi[k * g], g, c[k]);
    }
  }
  return psi;
}

}  // namespace

DensityProfile exact_density(const SpectralSolution& s, double beta, std::span<const double> grid) {
  const Boltzmann b = boltzmann(s, beta);
  const std::size_t g = grid.size();
  const std::vector<double> psi = level_functions(s, b.weights.size(), grid);
  const auto& kt = simd::kernels_for(simd::active_level());
  std::vector<double> rho(g, 0.0);
  for (std::size_t level = 0; level < b.weights.size(); ++level) {
    kt.accumulate_squares(rho.data(), &psi[level * g], g, b.weights[level]);
  }

  DensityProfile out;
  out.grid.assign(grid.begin(), grid.end());
  out.rho = std::move(rho);
  out.beta = beta;
  out.normalization_error = std::abs(trapezoid(out.grid, out.rho) - 1.0);
  return out;
}

std::vector<double> exact_density_matrix(const SpectralSolution& s, double beta,
                                         std::span<const double> grid) {
  const Boltzmann b = boltzmann(s, beta);
  const std::size_t g = grid.size();
  const std::vector<double> psi = level_functions(s, b.weights.size(), grid);
  const auto& kt = simd::kernels_for(simd::active_level());
  std::vector<double> out(g * g, 0.0);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t level = 0; level < b.weights.size(); ++level) {
      kt.axpy(&out[i * g], &psi[level * g], g, b.weights[level] * psi[level * g + i]);
    }
  }
  return out;
}

LevelExpectations level_expectations(const SpectralSolution& s, std::size_t level) {
  if (level >= s.energies.size()) throw DomainError("level index out of range");
  const std::size_t n = s.basis_size;
  const X2Band band = x2_band(n + 2, s.basis_frequency);
  const auto c = s.coefficients(level);
  LevelExpectations e;
  for (std::size_t i = 0; i < n; ++i) {
    if (c[i] == 0.0) continue;
    const std::size_t lo = i >= 4 ? i - 4 : 0;
    for (std::size_t j = lo; j < std::min(n, i + 5); ++j) {
      const double cc = c[i] * c[j];
      e.kinetic += 0.5 * cc * p2_at(i, j, s.basis_frequency);
      e.x2 += cc * x2_at(band, i, j);
      e.x4 += cc * x4_at(band, i, j);
    }
  }
  return e;
}

}  // namespace oeprop::oracle
