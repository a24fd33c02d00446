#include "oeprop/oef.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "oeprop/detail/stationary.hpp"
#include "oeprop/errors.hpp"

namespace oeprop {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::EXACT: return "EXACT";
    case Method::FK: return "FK";
    case Method::OEF: return "OEF";
    case Method::OEP: return "OEP";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  std::string up(s);
  for (char& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  for (Method m : {Method::EXACT, Method::FK, Method::OEF, Method::OEP}) {
    if (up == method_name(m)) return m;
  }
  throw DomainError("unknown method '" + std::string(s) + "' (expected OEP, OEF, FK, EXACT)");
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> parts;
  parts.reserve(x.size());
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    parts.push_back(0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]));
  }
  return pairwise_sum(parts);
}

namespace oef {
namespace {

struct Occupation {
  double c;      // coth(y)/2, y = beta w / 2
  double dc;     // dc/dw
  double log_1m; // ln(1 - e^{-beta w})
};

Occupation occupation(double beta, double omega) {
  const double y = 0.5 * beta * omega;
  const double q = std::exp(-2.0 * y);  // e^{-beta w}
  Occupation o;
  // 1 - q = -expm1(-beta w) keeps precision for small beta w.
  const double one_minus_q = -std::expm1(-2.0 * y);
  o.c = 0.5 * (1.0 + q) / one_minus_q;
  // csch^2 y = 4 q / (1 - q)^2
  o.dc = -0.25 * beta * 4.0 * q / (one_minus_q * one_minus_q);
  o.log_1m = std::log(one_minus_q);
  return o;
}

void check(const OscillatorParams& params, double beta, double omega) {
  params.validate();
  if (!(std::isfinite(beta) && beta > 0.0)) throw DomainError("beta must be positive and finite");
  if (!(std::isfinite(omega) && omega > 0.0)) {
    throw DomainError("trial frequency omega must be positive and finite");
  }
}

}  // namespace

double free_energy_at(const OscillatorParams& params, double beta, double omega) {
  check(params, beta, omega);
  const Occupation o = occupation(beta, omega);
  return 0.5 * omega + o.log_1m / beta + (params.m2 - omega * omega) / (2.0 * omega) * o.c +
         3.0 * params.lambda * o.c * o.c / (omega * omega);
}

double gap_residual(const OscillatorParams& params, double beta, double omega) {
  check(params, beta, omega);
  const Occupation o = occupation(beta, omega);
  const double w2 = omega * omega;
  return (o.c - omega * o.dc) *
         ((w2 - params.m2) / (2.0 * w2) - 6.0 * params.lambda * o.c / (w2 * omega));
}

oep::GapSolution optimize_omega(const OscillatorParams& params, double beta,
                                const oep::OptimizerOptions& opts) {
  check(params, beta, 1.0);
  const double w_ref = std::max(
      {std::sqrt(std::abs(params.m2)), std::cbrt(6.0 * params.lambda), 1.0 / beta});
  const auto grid = detail::log_grid(w_ref, opts.window_decades, opts.scan_points);
  const auto sp = detail::largest_root([&](double w) { return gap_residual(params, beta, w); },
                                       grid, 1e-12, opts.newton_steps);
  oep::GapSolution sol;
  sol.omega_star = sp.x;
  sol.residual = std::abs(gap_residual(params, beta, sp.x));
  sol.bracket = sp.bracket;
  sol.n_roots = sp.n_roots;
  const double f = free_energy_at(params, beta, sp.x);
  sol.tolerance = std::max(opts.tol_root * std::max(1.0, beta * std::abs(f) / sp.x),
                           64.0 * std::numeric_limits<double>::epsilon() *
                               (1.0 + std::abs(params.m2) + params.lambda) /
                               std::min(1.0, sp.x * sp.x));
  sol.fallback_used = !sp.from_root;
  if (sp.from_root && sol.residual > sol.tolerance) {
    std::ostringstream msg;
    msg << "free-energy gap equation not converged at beta = " << beta
        << ": |dF/dw| = " << sol.residual;
    throw ConvergenceError(msg.str());
  }
  return sol;
}

FreeEnergyResult free_energy(const OscillatorParams& params, double beta,
                             const oep::OptimizerOptions& opts) {
  const auto sol = optimize_omega(params, beta, opts);
  FreeEnergyResult r;
  r.beta = beta;
  r.method = Method::OEF;
  r.omega_diag = sol.omega_star;
  r.f = free_energy_at(params, beta, sol.omega_star);
  return r;
}

}  // namespace oef
}  // namespace oeprop
