#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "oeprop/errors.hpp"
#include "oeprop/oracle.hpp"

using namespace oeprop;
using namespace oeprop::oracle;

namespace {

constexpr double kE0Quartic = 0.667986259;

// Hamiltonian built from the position operator x = (a + a^dag)/sqrt(2 Omega)
// and momentum p = i sqrt(Omega/2)(a^dag - a) at size N + 4, then truncated.
Eigen::VectorXd eigen_levels(const OscillatorParams& p, int n, double omega) {
  const int m = n + 4;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const Eigen::MatrixXd x = (a + a.transpose()) / std::sqrt(2.0 * omega);
  const Eigen::MatrixXd pm = (a.transpose() - a) * std::sqrt(omega / 2.0);  // p / i
  const Eigen::MatrixXd x2 = x * x;
  const Eigen::MatrixXd h = -0.5 * pm * pm + 0.5 * p.m2 * x2 + p.lambda * x2 * x2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.topLeftCorner(n, n));
  return es.eigenvalues();
}

int count_maxima(const std::vector<double>& r) {
  const double top = *std::max_element(r.begin(), r.end());
  int c = 0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    if (r[i] > 1e-6 * top && r[i] > r[i - 1] && r[i] >= r[i + 1]) ++c;
  }
  return c;
}

std::vector<double> uniform(double x, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = x * (2.0 * i / (n - 1) - 1.0);
  return g;
}

}  // namespace

TEST_CASE("harmonic spectrum is exact in its own basis") {
  const auto s = solve_spectrum({1.0, 0.0}, 64, 1.0);
  for (std::size_t n = 0; n < 64; ++n) CHECK(std::abs(s.energies[n] - (n + 0.5)) < 1e-12);
}

TEST_CASE("quartic ground state converges in N and Omega") {
  const OscillatorParams q{0.0, 1.0};
  const double ref = solve_spectrum(q, 128, 2.0).energies[0];
  CHECK(std::abs(ref - kE0Quartic) < 1e-8);
  CHECK(std::abs(solve_spectrum(q, 64, 2.0).energies[0] - ref) < 1e-9);
  for (double omega : {1.5, 3.0}) CHECK(std::abs(solve_spectrum(q, 128, omega).energies[0] - ref) < 1e-9);
  for (double omega : {1.0, 4.0}) CHECK(std::abs(solve_spectrum(q, 128, omega).energies[0] - ref) < 1e-8);
}

TEST_CASE("ground-state energy is non-increasing in the basis size") {
  const OscillatorParams q{0.0, 1.0};
  double prev = INFINITY;
  for (std::size_t n : {16u, 32u, 64u, 128u}) {
    const double e0 = solve_spectrum(q, n, 2.0).energies[0];
    CHECK(e0 <= prev + 1e-14);
    prev = e0;
  }
}

TEST_CASE("spectrum agrees with an independent dense eigensolver") {
  for (const OscillatorParams p : {OscillatorParams{0.0, 1.0}, OscillatorParams{-1.0, 0.1},
                                   OscillatorParams{1.0, 10.0}}) {
    const double omega = default_basis_frequency(p);
    const auto s = solve_spectrum(p, 80, omega);
    const auto e = eigen_levels(p, 80, omega);
    for (int n = 0; n < 80; ++n) {
      CHECK(std::abs(s.energies[n] - e(n)) < 1e-10 * std::max(1.0, std::abs(e(n))));
    }
  }
}

TEST_CASE("Jacobi solver on a random symmetric matrix") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const std::size_t n = 37;
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = g(rng);
  }
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m(i, j);
  }
  const auto r = jacobi_eigensystem(a, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(std::abs(r.values[k] - es.eigenvalues()(k)) < 1e-12);
    Eigen::VectorXd v(n);
    for (std::size_t i = 0; i < n; ++i) v(i) = r.vectors[k * n + i];
    CHECK((m * v - r.values[k] * v).norm() < 1e-11);
  }
  CHECK(r.sweeps <= 50);
  CHECK_THROWS_AS(jacobi_eigensystem(a, n, 1e-13, 0), ConvergenceError);
}

TEST_CASE("eigenvectors are orthonormal") {
  const auto s = solve_spectrum({-1.0, 0.1}, 96, 1.0);
  const std::size_t n = s.basis_size;
  double worst = 0.0;
  for (std::size_t i = 0; i < n; i += 5) {
    for (std::size_t j = i; j < n; j += 3) {
      double dot = 0.0;
      for (std::size_t k = 0; k < n; ++k) dot += s.eigenvectors[i * n + k] * s.eigenvectors[j * n + k];
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("virial theorem per eigenstate") {
  for (const OscillatorParams p : {OscillatorParams{0.0, 1.0}, OscillatorParams{1.0, 10.0},
                                   OscillatorParams{-1.0, 0.1}}) {
    const auto s = solve_spectrum(p, 128, default_basis_frequency(p));
    for (std::size_t n : {0u, 1u, 2u, 5u, 10u}) {
      const auto e = level_expectations(s, n);
      const double lhs = 2.0 * e.kinetic;
      const double rhs = p.m2 * e.x2 + 4.0 * p.lambda * e.x4;
      CHECK(std::abs(lhs - rhs) < 1e-6 * std::max(1.0, std::abs(lhs)));
      CHECK(std::abs(e.kinetic + 0.5 * p.m2 * e.x2 + p.lambda * e.x4 - s.energies[n]) < 1e-9);
    }
  }
}

TEST_CASE("double well has a small positive ground-state splitting") {
  // Barrier height 3.125, about two local quanta deep.
  const auto s = solve_spectrum({-1.0, 0.02}, 128, 1.0);
  const double split = s.energies[1] - s.energies[0];
  MESSAGE("E1 - E0 = " << split);
  CHECK(split > 0.0);
  CHECK(split < 0.1 * (s.energies[2] - s.energies[1]));
}

TEST_CASE("exact free energy") {
  const auto h = solve_spectrum({1.0, 0.0}, 128, 1.0);
  CHECK(std::abs(exact_free_energy(h, 1.0).f - std::log(2.0 * std::sinh(0.5))) < 1e-13);
  CHECK(exact_free_energy(h, 1.0).f == doctest::Approx(0.041322).epsilon(1e-5));

  const auto q = solve_spectrum({0.0, 1.0}, 128, 2.0);
  CHECK(std::abs(exact_free_energy(q, 200.0).f - q.energies[0]) < 1e-12);

  // High temperature needs enough levels for the tail bound.
  CHECK_THROWS_AS(exact_free_energy(solve_spectrum({0.0, 1.0}, 64, 2.0), 0.1), TruncationError);
  const auto big = solve_spectrum({0.0, 1.0}, 256, 2.0);
  const double f256 = exact_free_energy(big, 0.1).f;
  const double f400 = exact_free_energy(solve_spectrum({0.0, 1.0}, 400, 2.0), 0.1).f;
  MESSAGE("F(beta = 0.1) = " << f256);
  CHECK(std::abs(f256 - f400) < 1e-9);
  const auto autosized = solve_spectrum_for({0.0, 1.0}, 0.1);
  CHECK(std::abs(exact_free_energy(autosized, 0.1).f - f400) < 1e-9);
}

TEST_CASE("Hermite functions are orthonormal") {
  const double omega = 1.7;
  const auto grid = uniform(12.0, 2401);
  const auto phi = hermite_functions(omega, 40, grid);
  const std::size_t g = grid.size();
  const double h = grid[1] - grid[0];
  for (std::size_t i = 0; i < 40; i += 7) {
    for (std::size_t j = 0; j < 40; j += 3) {
      double dot = 0.0;
      for (std::size_t k = 0; k < g; ++k) dot += phi[i * g + k] * phi[j * g + k];
      CHECK(std::abs(dot * h - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
  }
  // Far tails are representable thanks to the scaled recurrence.
  const std::vector<double> far{30.0, 60.0};
  const auto tail = hermite_functions(1.0, 3, far);
  CHECK(tail[0] > 0.0);
  CHECK(std::abs(std::log(tail[0]) - (0.25 * std::log(1.0 / std::numbers::pi) - 450.0)) < 1e-9);
  CHECK(tail[1] == 0.0);  // exp(-1800) underflows on output, without overflow on the way
  const std::vector<double> absurd{1e7};
  CHECK_THROWS_AS(hermite_functions(1.0, 3, absurd), RangeError);
}

TEST_CASE("exact density: harmonic Gaussian and ground-state limit") {
  const auto grid = uniform(12.0, 301);
  for (double beta : {0.5, 2.0}) {
    const auto s = solve_spectrum_for({1.0, 0.0}, beta);
    const auto d = exact_density(s, beta, grid);
    const double th = std::tanh(0.5 * beta);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(d.rho[i] - std::sqrt(th / std::numbers::pi) * std::exp(-th * grid[i] * grid[i])) < 1e-8);
    }
    CHECK(d.normalization_error < 1e-8);
  }

  const auto q = solve_spectrum({0.0, 1.0}, 128, 2.0);
  const auto g = uniform(4.0, 201);
  const auto d = exact_density(q, 200.0, g);
  CHECK(count_maxima(d.rho) == 1);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(d.rho[i] - d.rho[g.size() - 1 - i]) < 1e-12);
}

TEST_CASE("double-well thermal density is bimodal near the classical minima") {
  const OscillatorParams dw{-1.0, 0.1};
  const auto s = solve_spectrum_for(dw, 5.0);
  const auto grid = uniform(6.0, 601);
  const auto d = exact_density(s, 5.0, grid);
  CHECK(count_maxima(d.rho) == 2);
  const auto peak = std::max_element(d.rho.begin() + 300, d.rho.end()) - d.rho.begin();
  const double x_min = std::sqrt(-dw.m2 / (4.0 * dw.lambda));
  MESSAGE("peak at " << grid[peak] << ", classical minimum at " << x_min);
  CHECK(std::abs(grid[peak] / x_min - 1.0) < 0.3);
  CHECK(d.normalization_error < 1e-8);
}

TEST_CASE("exact density matrix: diagonal is the density and it is symmetric") {
  const OscillatorParams p{1.0, 10.0};
  const auto s = solve_spectrum_for(p, 2.0);
  const auto grid = uniform(2.5, 21);
  const auto m = exact_density_matrix(s, 2.0, grid);
  const auto d = exact_density(s, 2.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(m[i * 21 + i] - d.rho[i]) < 1e-13);
    for (std::size_t j = 0; j < grid.size(); ++j) CHECK(std::abs(m[i * 21 + j] - m[j * 21 + i]) < 1e-13);
  }
}

TEST_CASE("invalid oracle inputs") {
  CHECK_THROWS_AS(solve_spectrum({0.0, 1.0}, 8, 1.0), DomainError);
  CHECK_THROWS_AS(solve_spectrum({0.0, 1.0}, 32, 0.0), DomainError);
}
