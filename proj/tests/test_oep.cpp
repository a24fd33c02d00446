#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "oeprop/errors.hpp"
#include "oeprop/oep.hpp"

using namespace oeprop;
using oep::cplx;
using boost::math::quadrature::gauss_kronrod;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

template <class F>
double gk(F f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

// First-order log-amplitude assembled from independently integrated Euclidean paths.
double assembled_imag(const OscillatorParams& p, double xa, double xb, double beta, double w) {
  const double s = std::sinh(w * beta);
  auto L = [&](double t) { return (xa * std::sinh(w * (beta - t)) + xb * std::sinh(w * t)) / s; };
  auto K = [&](double t) { return std::sinh(w * t) * std::sinh(w * (beta - t)) / (w * s); };
  const double l2 = gk([&](double t) { return L(t) * L(t); }, 0.0, beta);
  const double k = gk(K, 0.0, beta);
  const double l4 = gk([&](double t) { return std::pow(L(t), 4); }, 0.0, beta);
  const double l2k = gk([&](double t) { return L(t) * L(t) * K(t); }, 0.0, beta);
  const double kk = gk([&](double t) { return K(t) * K(t); }, 0.0, beta);
  const double w0 = 0.5 * std::log(w / (2.0 * std::numbers::pi * s)) -
                    w * ((xa * xa + xb * xb) * std::cosh(w * beta) - 2.0 * xa * xb) / (2.0 * s);
  return w0 - 0.5 * (p.m2 - w * w) * (l2 + k) - p.lambda * (l4 + 6.0 * l2k + 3.0 * kk);
}

// Real-time log-amplitude from the trigonometric paths:
// ln A = W0 - i (m2 - w^2)/2 int(L^2 + i K) - i lambda int(L^4 + 6 i L^2 K - 3 K^2).
cplx assembled_real(const OscillatorParams& p, double xa, double xb, double T, double w) {
  const double s = std::sin(w * T);
  auto L = [&](double t) { return (xa * std::sin(w * (T - t)) + xb * std::sin(w * t)) / s; };
  auto K = [&](double t) { return std::sin(w * t) * std::sin(w * (T - t)) / (w * s); };
  const double l2 = gk([&](double t) { return L(t) * L(t); }, 0.0, T);
  const double k = gk(K, 0.0, T);
  const double l4 = gk([&](double t) { return std::pow(L(t), 4); }, 0.0, T);
  const double l2k = gk([&](double t) { return L(t) * L(t) * K(t); }, 0.0, T);
  const double kk = gk([&](double t) { return K(t) * K(t); }, 0.0, T);
  const cplx i(0.0, 1.0);
  // Valid for 0 < wT < pi, where no caustic phase enters.
  const cplx w0 = 0.5 * std::log(w / (2.0 * std::numbers::pi * i * s)) +
                  i * w * ((xa * xa + xb * xb) * std::cos(w * T) - 2.0 * xa * xb) / (2.0 * s);
  return w0 - i * 0.5 * (p.m2 - w * w) * (l2 + i * k) - i * p.lambda * (l4 + 6.0 * i * l2k - 3.0 * kk);
}

}  // namespace

TEST_CASE("harmonic limit: no correction at w = m") {
  const OscillatorParams h{2.25, 0.0};
  for (double x : {0.0, 0.4, -1.3}) {
    const EuclideanPoint p{x, 0.5 * x + 0.1, 0.8};
    CHECK(oep::w1_imag(h, p, 1.5) == kernels::w0_imag(p, 1.5));
    CHECK(oep::gap_residual_imag(h, p, 1.5) == 0.0);
  }
  const EuclideanPoint p{0.3, -0.2, 1.1};
  const auto i = kernels::kernel_integrals_imag(p, 1.2);
  CHECK(rel(oep::w1_imag(h, p, 1.2), kernels::w0_imag(p, 1.2) - 0.5 * (2.25 - 1.44) * (i.l2 + i.k)) <
        1e-14);
}

TEST_CASE("first-order log-amplitude matches an independent quadrature assembly") {
  const OscillatorParams q{0.0, 1.0};
  CHECK(rel(oep::w1_imag(q, {0.0, 0.0, 1.0}, 2.0), assembled_imag(q, 0.0, 0.0, 1.0, 2.0)) < 1e-10);
  CHECK(rel(oep::w1_imag(q, {0.7, -0.4, 2.0}, 1.3), assembled_imag(q, 0.7, -0.4, 2.0, 1.3)) < 1e-10);

  const OscillatorParams p{1.0, 0.1};
  const cplx log_amp = cplx(0.0, 1.0) * oep::w1_real(p, {0.5, 0.5, 1.0}, 1.2);
  CHECK(rel(log_amp, assembled_real(p, 0.5, 0.5, 1.0, 1.2)) < 1e-10);
}

TEST_CASE("real-time first order reduces to the harmonic amplitude at w = m") {
  const OscillatorParams h{1.0, 0.0};
  for (double T : {0.3, 1.7, 4.0}) {
    const RealTimePoint p{0.2, -0.6, T};
    CHECK(oep::w1_real(h, p, 1.0) == kernels::w0_real(p, 1.0));
  }
}

TEST_CASE("analytic residual agrees with central differences at 50 random points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> um2(-1.0, 2.0), ul(0.0, 2.0), ux(-3.0, 3.0),
      lb(std::log(0.05), std::log(20.0)), lw(std::log(0.2), std::log(5.0));
  double worst = 0.0;
  for (int n = 0; n < 50; ++n) {
    const OscillatorParams p{um2(rng), ul(rng) + 0.01};
    const EuclideanPoint e{ux(rng), ux(rng), std::exp(lb(rng))};
    const double w = std::exp(lw(rng));
    const double h = 1e-3 * w;
    auto f = [&](double s) { return oep::w1_imag(p, e, w + s * h); };
    const double fd = (8.0 * (f(1.0) - f(-1.0)) - (f(2.0) - f(-2.0))) / (12.0 * h);
    const double an = oep::gap_residual_imag(p, e, w);
    // Scale by the magnitude of W over w so points near a root do not blow up the ratio.
    const double scale = std::max(std::abs(an), std::abs(oep::w1_imag(p, e, w)) / w * 1e-4);
    worst = std::max(worst, std::abs(fd - an) / scale);
  }
  MESSAGE("worst relative difference " << worst);
  CHECK(worst <= 1e-6);
}

TEST_CASE("residual changes sign across the scan at beta = 5") {
  const OscillatorParams q{0.0, 1.0};
  const EuclideanPoint p{0.0, 0.0, 5.0};
  CHECK(oep::gap_residual_imag(q, p, 0.5) * oep::gap_residual_imag(q, p, 5.0) < 0.0);
  const auto s = oep::optimize_omega_imag(q, p);
  CHECK(s.n_roots >= 1);
  CHECK_FALSE(s.fallback_used);
}

TEST_CASE("harmonic oscillator: optimized frequency is m and W is exact") {
  const OscillatorParams h{1.0, 0.0};
  for (double beta : {0.1, 1.0, 5.0, 20.0}) {
    for (double x : {0.0, 0.8, -2.0}) {
      const EuclideanPoint p{x, 0.3 - x, beta};
      const auto a = oep::amplitude_imag(h, p);
      CHECK(std::abs(a.gap.omega_star - 1.0) < 1e-8);
      CHECK(std::abs(a.w_value - kernels::w0_imag(p, 1.0)) <= 1e-10 * std::max(1.0, std::abs(a.w_value)));
    }
  }
}

TEST_CASE("low-temperature frequency is near the cubic root") {
  const auto s = oep::optimize_omega_imag({0.0, 1.0}, {0.0, 0.0, 20.0});
  CHECK(std::abs(s.omega_star / std::cbrt(6.0) - 1.0) < 0.2);
  CHECK(s.residual <= 1e-10 * std::max(1.0, std::abs(oep::w1_imag({0.0, 1.0}, {0.0, 0.0, 20.0}, s.omega_star)) / s.omega_star));
}

TEST_CASE("solution diagnostics are consistent") {
  const OscillatorParams q{0.0, 1.0};
  for (double x : {0.0, 0.5, 1.5, 3.0}) {
    const auto s = oep::optimize_omega_imag(q, {x, x, 2.0});
    CHECK(s.omega_star > 0.0);
    CHECK(s.residual <= s.tolerance);
    CHECK(s.bracket.first <= s.omega_star);
    CHECK(s.omega_star <= s.bracket.second);
  }
}

TEST_CASE("optimized W is a genuine stationary point") {
  const OscillatorParams q{0.0, 1.0};
  for (double x : {0.0, 1.0}) {
    const EuclideanPoint p{x, x, 3.0};
    const double w = oep::optimize_omega_imag(q, p).omega_star;
    const double w0 = oep::w1_imag(q, p, w);
    const double up = oep::w1_imag(q, p, w * (1.0 + 1e-3)) - w0;
    const double down = oep::w1_imag(q, p, w * (1.0 - 1e-3)) - w0;
    // Quadratic: both sides equal to leading order, with the same sign.
    CHECK(up * down > 0.0);
    CHECK(std::abs(up / down - 1.0) < 0.05);
  }
}

TEST_CASE("parity and endpoint exchange") {
  const OscillatorParams dw{-1.0, 0.1};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-4.0, 4.0), ub(0.2, 6.0);
  for (int n = 0; n < 50; ++n) {
    const double x = ux(rng), y = ux(rng), beta = ub(rng);
    const auto a = oep::amplitude_imag(dw, {x, x, beta});
    const auto b = oep::amplitude_imag(dw, {-x, -x, beta});
    CHECK(rel(a.gap.omega_star, b.gap.omega_star) < 1e-12);
    CHECK(std::abs(a.w_value - b.w_value) < 1e-12 * std::max(1.0, std::abs(a.w_value)));
    const auto c = oep::amplitude_imag(dw, {x, y, beta});
    const auto d = oep::amplitude_imag(dw, {y, x, beta});
    CHECK(std::abs(c.w_value - d.w_value) < 1e-12 * std::max(1.0, std::abs(c.w_value)));
  }
}

TEST_CASE("analytic continuation of W1 on 20 random points") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> um2(-1.0, 2.0), ul(0.0, 1.0), ux(-2.0, 2.0),
      ub(0.1, 8.0), uw(0.3, 3.0);
  for (int n = 0; n < 20; ++n) {
    const OscillatorParams p{um2(rng), ul(rng) + 0.01};
    const double xa = ux(rng), xb = ux(rng), beta = ub(rng), w = uw(rng);
    const cplx cont = cplx(0.0, 1.0) * oep::w1_real_at(p, xa, xb, cplx(0.0, -beta), w);
    const double imag = oep::w1_imag(p, {xa, xb, beta}, w);
    CHECK(std::abs(cont - imag) <= 1e-9 * std::max(1.0, std::abs(imag)));
    const cplx r = oep::gap_residual_real_at(p, xa, xb, cplx(0.0, -beta), w);
    const double ri = oep::gap_residual_imag(p, {xa, xb, beta}, w);
    CHECK(std::abs(cplx(0.0, 1.0) * r - ri) <= 1e-9 * std::max(1.0, std::abs(ri)));
  }
}

TEST_CASE("real-time optimizer: harmonic and perturbative regimes") {
  const auto h = oep::optimize_omega_real({1.0, 0.0}, {0.2, 0.1, 0.5});
  CHECK(h.omega_star == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(h.residual == 0.0);
  CHECK_FALSE(h.fallback_used);

  const auto p = oep::optimize_omega_real({1.0, 0.01}, {0.2, 0.1, 0.5});
  CHECK(std::abs(p.omega_star - 1.0) < 0.05);

  // The optimized real-time amplitude at lambda = 0 continues to the Euclidean one.
  const OscillatorParams hp{1.0, 0.0};
  const auto r = oep::optimize_omega_real_at(hp, 0.4, -0.1, cplx(0.0, -2.0));
  const cplx cont = cplx(0.0, 1.0) * oep::w1_real_at(hp, 0.4, -0.1, cplx(0.0, -2.0), r.omega_star);
  CHECK(std::abs(cont - oep::w1_imag(hp, {0.4, -0.1, 2.0}, 1.0)) < 1e-12);
}

TEST_CASE("real-time optimum approaches the Euclidean one along a rotation path") {
  const OscillatorParams q{1.0, 0.5};
  const double tau = 2.0;
  const double target = oep::optimize_omega_imag(q, {0.3, 0.3, tau}).omega_star;
  double prev_gap = INFINITY;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double theta = 0.5 * std::numbers::pi * (1.0 - eps);
    const cplx t = tau * std::exp(cplx(0.0, -theta));
    const double w = oep::optimize_omega_real_at(q, 0.3, 0.3, t).omega_star;
    const double gap = std::abs(w - target);
    CAPTURE(eps);
    CHECK(gap <= prev_gap);
    CHECK(gap < 10.0 * eps * target);
    prev_gap = gap;
  }
}

TEST_CASE("errors: caustic and invalid frequency") {
  CHECK_THROWS_AS(oep::w1_real({1.0, 0.1}, {0.0, 0.0, std::numbers::pi}, 1.0), CausticError);
  CHECK_THROWS_AS(oep::w1_imag({1.0, 0.1}, {0.0, 0.0, 1.0}, -1.0), DomainError);
}
