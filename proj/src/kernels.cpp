#include "oeprop/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "oeprop/detail/euclidean.hpp"
#include "oeprop/errors.hpp"

namespace oeprop {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

void OscillatorParams::validate() const {
  require(std::isfinite(m2) && std::isfinite(lambda), "oscillator parameters must be finite");
  require(lambda >= 0.0, "quartic coupling lambda must be non-negative");
  require(lambda > 0.0 || m2 > 0.0, "harmonic case (lambda = 0) requires m2 > 0");
}

void EuclideanPoint::validate() const {
  require(std::isfinite(x_a) && std::isfinite(x_b), "endpoints must be finite");
  require(std::isfinite(beta) && beta > 0.0, "beta must be positive and finite");
}

void RealTimePoint::validate() const {
  require(std::isfinite(x_a) && std::isfinite(x_b), "endpoints must be finite");
  require(std::isfinite(time) && time > 0.0, "propagation time must be positive and finite");
}

namespace kernels {

namespace {

void require_omega(double omega) {
  require(std::isfinite(omega) && omega > 0.0, "trial frequency omega must be positive and finite");
}

// sinh(u)/sinh(B) for 0 <= u <= B, without overflow.
double sinh_ratio(double u, double B) {
  return std::exp(u - B) * std::expm1(-2.0 * u) / std::expm1(-2.0 * B);
}

}  // namespace

double path_L(double x_a, double x_b, double t, double omega, double beta) {
  require_omega(omega);
  require(std::isfinite(beta) && beta > 0.0, "beta must be positive and finite");
  require(std::isfinite(x_a) && std::isfinite(x_b) && std::isfinite(t), "non-finite input");
  require(t >= 0.0 && t <= beta, "t must lie in [0, beta]");
  const double B = omega * beta;
  return x_a * sinh_ratio(omega * (beta - t), B) + x_b * sinh_ratio(omega * t, B);
}

double path_K(double t, double omega, double beta) {
  require_omega(omega);
  require(std::isfinite(beta) && beta > 0.0, "beta must be positive and finite");
  require(std::isfinite(t) && t >= 0.0 && t <= beta, "t must lie in [0, beta]");
  const double B = omega * beta;
  const double u = omega * t;
  // sinh(u) sinh(B-u) / sinh(B) = (1 - e^-2u)(1 - e^-2(B-u)) / (2 (1 - e^-2B))
  return 0.5 * std::expm1(-2.0 * u) * std::expm1(-2.0 * (B - u)) / (-std::expm1(-2.0 * B)) /
         omega;
}

namespace detail {

template <class S>
EuclideanTerms<S> euclidean_terms(double x_a, double x_b, S beta_e, double omega,
                                  bool with_derivatives) {
  const S B = omega * beta_e;
  const auto m202 = sinh_moment<S>(2, 0, 2, B);
  const auto m112 = sinh_moment<S>(1, 1, 2, B);
  const auto m111 = sinh_moment<S>(1, 1, 1, B);
  const auto m404 = sinh_moment<S>(4, 0, 4, B);
  const auto m314 = sinh_moment<S>(3, 1, 4, B);
  const auto m224 = sinh_moment<S>(2, 2, 4, B);
  const auto m313 = sinh_moment<S>(3, 1, 3, B);
  const auto m223 = sinh_moment<S>(2, 2, 3, B);
  const auto m222 = sinh_moment<S>(2, 2, 2, B);

  const double n2 = x_a * x_a + x_b * x_b;
  const double c = x_a * x_b;
  const double n4 = x_a * x_a * x_a * x_a + x_b * x_b * x_b * x_b;

  // Integrals over u = omega t in [0, B]; functions of B alone.
  const S P2 = n2 * m202.value + 2.0 * c * m112.value;
  const S G1 = m111.value;
  const S P4 = n4 * m404.value + 4.0 * c * n2 * m314.value + 6.0 * c * c * m224.value;
  const S P2G = n2 * m313.value + 2.0 * c * m223.value;
  const S G2 = m222.value;

  const double w = omega;
  EuclideanTerms<S> out;
  out.ints.l2 = P2 / w;
  out.ints.k = G1 / (w * w);
  out.ints.l4 = P4 / w;
  out.ints.l2k = P2G / (w * w);
  out.ints.kk = G2 / (w * w * w);

  const Hyperbolic<S> h = hyperbolic<S>(B);
  const S quad_form = n2 * h.coth - 2.0 * c * h.csch;
  out.w0 = 0.5 * (std::log(w) - std::log(2.0 * std::numbers::pi) - h.log_sinh) - 0.5 * w * quad_form;

  if (with_derivatives) {
    const S dP2 = n2 * m202.derivative + 2.0 * c * m112.derivative;
    const S dG1 = m111.derivative;
    const S dP4 = n4 * m404.derivative + 4.0 * c * n2 * m314.derivative +
                  6.0 * c * c * m224.derivative;
    const S dP2G = n2 * m313.derivative + 2.0 * c * m223.derivative;
    const S dG2 = m222.derivative;
    // d/dw [F(w beta_E) / w^k] = beta_E F' / w^k - k F / w^(k+1)
    out.dints.l2 = beta_e * dP2 / w - P2 / (w * w);
    out.dints.k = beta_e * dG1 / (w * w) - 2.0 * G1 / (w * w * w);
    out.dints.l4 = beta_e * dP4 / w - P4 / (w * w);
    out.dints.l2k = beta_e * dP2G / (w * w) - 2.0 * P2G / (w * w * w);
    out.dints.kk = beta_e * dG2 / (w * w * w) - 3.0 * G2 / (w * w * w * w);

    const S dquad_dB = -n2 * h.csch * h.csch + 2.0 * c * h.csch * h.coth;
    out.dw0 = 0.5 / w - 0.5 * beta_e * h.coth - 0.5 * quad_form - 0.5 * w * beta_e * dquad_dB;
  }
  return out;
}

template EuclideanTerms<double> euclidean_terms<double>(double, double, double, double, bool);
template EuclideanTerms<cplx> euclidean_terms<cplx>(double, double, cplx, double, bool);

cplx euclidean_time_from_real(cplx time, double omega) {
  require_omega(omega);
  require(std::isfinite(time.real()) && std::isfinite(time.imag()), "time must be finite");
  const cplx beta_e = cplx(0.0, 1.0) * time;
  require(beta_e.real() >= 0.0, "complex time must satisfy Im T <= 0");
  require(beta_e.real() > 0.0 || beta_e.imag() > 0.0, "real propagation time must be positive");
  if (near_caustic(time, omega)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "caustic: |sin(omega T)| < " << kCausticTolerance << " at omega = " << omega
        << ", T = " << time;
    throw CausticError(msg.str());
  }
  return beta_e;
}

}  // namespace detail

bool near_caustic(cplx time, double omega) {
  const cplx B = cplx(0.0, omega) * time;
  if (std::abs(B.real()) > 20.0) return false;
  return std::abs(std::sinh(B)) < kCausticTolerance;
}

KernelIntegrals kernel_integrals_imag(const EuclideanPoint& p, double omega) {
  p.validate();
  require_omega(omega);
  return detail::euclidean_terms<double>(p.x_a, p.x_b, p.beta, omega, false).ints;
}

KernelQuadrature kernel_integrals_imag_quadrature(const EuclideanPoint& p, double omega,
                                                  const quad::Options& opts) {
  p.validate();
  require_omega(omega);
  const double beta = p.beta;
  auto L = [&](double t) { return path_L(p.x_a, p.x_b, std::clamp(t, 0.0, beta), omega, beta); };
  auto K = [&](double t) { return path_K(std::clamp(t, 0.0, beta), omega, beta); };
  KernelQuadrature out;
  auto run = [&](auto&& f, double& value, double& error) {
    const quad::Result r = quad::integrate_or_throw(f, 0.0, beta, opts);
    value = r.value;
    error = r.error;
  };
  run([&](double t) { const double l = L(t); return l * l; }, out.values.l2, out.errors.l2);
  run(K, out.values.k, out.errors.k);
  run([&](double t) { const double l = L(t); return l * l * l * l; }, out.values.l4, out.errors.l4);
  run([&](double t) { const double l = L(t); return l * l * K(t); }, out.values.l2k, out.errors.l2k);
  run([&](double t) { const double k = K(t); return k * k; }, out.values.kk, out.errors.kk);
  return out;
}

ComplexKernelIntegrals euclidean_from_real(const ComplexKernelIntegrals& r) {
  const cplx i(0.0, 1.0);
  return {i * r.l2, -r.k, i * r.l4, -r.l2k, -i * r.kk};
}

ComplexKernelIntegrals real_from_euclidean(const ComplexKernelIntegrals& e) {
  const cplx i(0.0, 1.0);
  return {-i * e.l2, -e.k, -i * e.l4, -e.l2k, i * e.kk};
}

ComplexKernelIntegrals kernel_integrals_real_at(double x_a, double x_b, cplx time, double omega) {
  require(std::isfinite(x_a) && std::isfinite(x_b), "endpoints must be finite");
  const cplx beta_e = detail::euclidean_time_from_real(time, omega);
  return real_from_euclidean(detail::euclidean_terms<cplx>(x_a, x_b, beta_e, omega, false).ints);
}

ComplexKernelIntegrals kernel_integrals_real(const RealTimePoint& p, double omega) {
  p.validate();
  return kernel_integrals_real_at(p.x_a, p.x_b, cplx(p.time, 0.0), omega);
}

double w0_imag(const EuclideanPoint& p, double omega) {
  p.validate();
  require_omega(omega);
  return detail::euclidean_terms<double>(p.x_a, p.x_b, p.beta, omega, false).w0;
}

cplx w0_real_at(double x_a, double x_b, cplx time, double omega) {
  require(std::isfinite(x_a) && std::isfinite(x_b), "endpoints must be finite");
  const cplx beta_e = detail::euclidean_time_from_real(time, omega);
  const cplx log_amplitude = detail::euclidean_terms<cplx>(x_a, x_b, beta_e, omega, false).w0;
  return cplx(0.0, -1.0) * log_amplitude;
}

cplx w0_real(const RealTimePoint& p, double omega) {
  p.validate();
  return w0_real_at(p.x_a, p.x_b, cplx(p.time, 0.0), omega);
}

}  // namespace kernels
}  // namespace oeprop
