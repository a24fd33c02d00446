#include "oeprop/fk.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "oeprop/detail/trace.hpp"
#include "oeprop/errors.hpp"

namespace oeprop::fk {
namespace {

constexpr double kSeriesCut = 1e-2;

// (y coth y - 1) / z with z = y^2, continued to z < 0.
double phi(double z) {
  if (std::abs(z) < kSeriesCut) {
    return 1.0 / 3.0 +
           z * (-1.0 / 45.0 +
                z * (2.0 / 945.0 +
                     z * (-1.0 / 4725.0 + z * (2.0 / 93555.0 + z * (-1382.0 / 638512875.0)))));
  }
  if (z > 0.0) {
    const double y = std::sqrt(z);
    return (y / std::tanh(y) - 1.0) / z;
  }
  const double nu = std::sqrt(-z);
  return (nu / std::tan(nu) - 1.0) / z;
}

// ln(sinh y / y) with z = y^2, continued to z < 0.
double log_sinhc(double z) {
  if (std::abs(z) < kSeriesCut) {
    return z * (1.0 / 6.0 +
                z * (-1.0 / 180.0 +
                     z * (1.0 / 2835.0 + z * (-1.0 / 37800.0 + z * (1.0 / 467775.0)))));
  }
  if (z > 0.0) {
    const double y = std::sqrt(z);
    if (y > 20.0) return y - std::numbers::ln2 + std::log1p(-std::exp(-2.0 * y)) - std::log(y);
    return std::log(std::sinh(y) / y);
  }
  const double nu = std::sqrt(-z);
  return std::log(std::sin(nu) / nu);
}

double lower_bound(double beta) {
  const double b = 2.0 * std::numbers::pi / beta;
  return -b * b;
}

void check_beta(double beta) {
  if (!(std::isfinite(beta) && beta > 0.0)) throw DomainError("beta must be positive and finite");
}

}  // namespace

double smearing_width(double omega2, double beta) {
  check_beta(beta);
  if (!(std::isfinite(omega2) && omega2 > lower_bound(beta))) {
    throw DomainError("Omega^2 must exceed -(2 pi / beta)^2");
  }
  return 0.25 * beta * phi(0.25 * beta * beta * omega2);
}

EffectivePotential effective_potential(const OscillatorParams& params, double x0, double beta) {
  params.validate();
  check_beta(beta);
  if (!std::isfinite(x0)) throw DomainError("x0 must be finite");

  const double x2 = x0 * x0;
  const double lam = params.lambda;
  auto g = [&](double w2) { return w2 - params.m2 - 12.0 * lam * (x2 + smearing_width(w2, beta)); };

  // g is increasing; a^2 <= beta/12 for Omega^2 >= 0 bounds the root from above.
  const double hi = std::max(0.0, params.m2 + 12.0 * lam * x2 + lam * beta) + 1.0;
  double lo = 0.0;
  if (g(lo) >= 0.0) {
    const double floor = lower_bound(beta);
    double frac = 0.5;
    lo = floor * frac;
    while (g(lo) >= 0.0) {
      frac = 0.5 * (1.0 + frac);
      if (frac > 1.0 - 1e-15) {
        throw ConvergenceError("Feynman-Kleinert frequency not bracketed");
      }
      lo = floor * frac;
    }
  }
  double w2 = 0.0;
  if (lam == 0.0) {
    w2 = params.m2;
  } else {
    std::uintmax_t iterations = 200;
    const auto r = boost::math::tools::toms748_solve(
        g, lo, hi, boost::math::tools::eps_tolerance<double>(52), iterations);
    w2 = 0.5 * (r.first + r.second);
  }

  EffectivePotential out;
  out.omega2 = w2;
  out.a2 = smearing_width(w2, beta);
  const double a2 = out.a2;
  const double z = 0.25 * beta * beta * w2;
  out.v_cl = log_sinhc(z) / beta - 0.5 * w2 * a2 + 0.5 * params.m2 * (x2 + a2) +
             lam * (x2 * x2 + 6.0 * x2 * a2 + 3.0 * a2 * a2);
  return out;
}

FreeEnergyResult free_energy(const OscillatorParams& params, double beta,
                             const quad::Options& opts) {
  params.validate();
  check_beta(beta);
  const double x0 =
      3.0 * std::max({1.0, params.lambda > 0.0 ? std::pow(1.0 / (beta * params.lambda), 0.25) : 0.0,
                      1.0 / std::sqrt(beta * std::max(params.m2, 1.0))});
  const double norm = -0.5 * std::log(2.0 * std::numbers::pi * beta);
  const auto li = detail::integrate_log_weight(
      [&](double x) { return norm - beta * effective_potential(params, x, beta).v_cl; }, x0,
      1e-12, opts);
  FreeEnergyResult r;
  r.beta = beta;
  r.method = Method::FK;
  r.f = -li.log_value / beta;
  r.err_est = li.rel_error / beta;
  const double w2 = effective_potential(params, 0.0, beta).omega2;
  r.omega_diag = std::copysign(std::sqrt(std::abs(w2)), w2);
  return r;
}

}  // namespace oeprop::fk
