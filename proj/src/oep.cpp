#include "oeprop/oep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "oeprop/detail/euclidean.hpp"
#include "oeprop/detail/stationary.hpp"
#include "oeprop/errors.hpp"

namespace oeprop::detail {

std::vector<double> log_grid(double center, double decades, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double lo = std::log(center) - decades * std::log(10.0);
  const double step = 2.0 * decades * std::log(10.0) / (points - 1);
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = std::exp(lo + step * i);
  return grid;
}

}  // namespace oeprop::detail

namespace oeprop::oep {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kBisectionWidth = 1e-12;

template <class S>
struct Evaluation {
  S log_amplitude{};
  S residual{};         // d(log amplitude)/dw
  double noise = 0.0;   // rounding floor of the residual
};

template <class S>
Evaluation<S> evaluate(const OscillatorParams& params, double x_a, double x_b, S beta_e,
                       double omega, bool with_residual) {
  const auto t = kernels::detail::euclidean_terms<S>(x_a, x_b, beta_e, omega, with_residual);
  const double mass_shift = 0.5 * (params.m2 - omega * omega);
  const double lam = params.lambda;
  Evaluation<S> e;
  e.log_amplitude = t.w0 - mass_shift * (t.ints.l2 + t.ints.k) -
                    lam * (t.ints.l4 + 6.0 * t.ints.l2k + 3.0 * t.ints.kk);
  if (with_residual) {
    const S quadratic = t.dints.l2 + t.dints.k;
    const S quartic = t.dints.l4 + 6.0 * t.dints.l2k + 3.0 * t.dints.kk;
    e.residual = -mass_shift * quadratic - lam * quartic;
    const double magnitude =
        std::abs(mass_shift) * (std::abs(t.dints.l2) + std::abs(t.dints.k)) +
        lam * (std::abs(t.dints.l4) + 6.0 * std::abs(t.dints.l2k) + 3.0 * std::abs(t.dints.kk));
    e.noise = 64.0 * kEps * magnitude;
  }
  return e;
}

void require_omega(double omega) {
  if (!(std::isfinite(omega) && omega > 0.0)) {
    throw DomainError("trial frequency omega must be positive and finite");
  }
}

std::vector<double> scan_grid(double w_ref, const OptimizerOptions& opts) {
  if (opts.scan_points < 2 || !(opts.window_decades > 0.0)) {
    throw DomainError("optimizer scan needs at least 2 points and a positive window");
  }
  return detail::log_grid(w_ref, opts.window_decades, opts.scan_points);
}

// Minimizes f on [lo, hi] with Brent's method; f must be finite there.
template <class F>
double brent_minimum(F&& f, double lo, double hi) {
  std::uintmax_t iterations = 200;
  const auto result = boost::math::tools::brent_find_minima(f, lo, hi, 40, iterations);
  return result.first;
}

}  // namespace

double reference_frequency(const OscillatorParams& params, double x_a, double x_b, double time) {
  const double spread = std::max(1.0, x_a * x_a + x_b * x_b);
  return std::max({std::sqrt(std::abs(params.m2)), std::cbrt(6.0 * params.lambda * spread),
                   1.0 / std::abs(time)});
}

double w1_imag(const OscillatorParams& params, const EuclideanPoint& p, double omega) {
  params.validate();
  p.validate();
  require_omega(omega);
  return evaluate<double>(params, p.x_a, p.x_b, p.beta, omega, false).log_amplitude;
}

cplx w1_real_at(const OscillatorParams& params, double x_a, double x_b, cplx time, double omega) {
  params.validate();
  const cplx beta_e = kernels::detail::euclidean_time_from_real(time, omega);
  const cplx log_amp = evaluate<cplx>(params, x_a, x_b, beta_e, omega, false).log_amplitude;
  return cplx(0.0, -1.0) * log_amp;
}

cplx w1_real(const OscillatorParams& params, const RealTimePoint& p, double omega) {
  p.validate();
  return w1_real_at(params, p.x_a, p.x_b, cplx(p.time, 0.0), omega);
}

double gap_residual_imag(const OscillatorParams& params, const EuclideanPoint& p, double omega) {
  params.validate();
  p.validate();
  require_omega(omega);
  return evaluate<double>(params, p.x_a, p.x_b, p.beta, omega, true).residual;
}

cplx gap_residual_real_at(const OscillatorParams& params, double x_a, double x_b, cplx time,
                          double omega) {
  params.validate();
  const cplx beta_e = kernels::detail::euclidean_time_from_real(time, omega);
  return cplx(0.0, -1.0) * evaluate<cplx>(params, x_a, x_b, beta_e, omega, true).residual;
}

cplx gap_residual_real(const OscillatorParams& params, const RealTimePoint& p, double omega) {
  p.validate();
  return gap_residual_real_at(params, p.x_a, p.x_b, cplx(p.time, 0.0), omega);
}

GapSolution optimize_omega_imag(const OscillatorParams& params, const EuclideanPoint& p,
                                const OptimizerOptions& opts) {
  params.validate();
  p.validate();
  auto eval = [&](double w) { return evaluate<double>(params, p.x_a, p.x_b, p.beta, w, true); };

  const std::vector<double> grid =
      scan_grid(reference_frequency(params, p.x_a, p.x_b, p.beta), opts);
  const detail::StationaryPoint sp = detail::largest_root(
      [&](double w) { return eval(w).residual; }, grid, kBisectionWidth, opts.newton_steps);

  const auto e = eval(sp.x);
  GapSolution sol;
  sol.omega_star = sp.x;
  sol.residual = std::abs(e.residual);
  sol.bracket = sp.bracket;
  sol.n_roots = sp.n_roots;
  sol.tolerance =
      std::max(opts.tol_root * std::max(1.0, std::abs(e.log_amplitude) / sp.x), e.noise);
  if (!sp.from_root) {
    sol.fallback_used = sol.residual > sol.tolerance;
    return sol;
  }
  if (sol.residual > sol.tolerance) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "gap equation not converged at x_a = " << p.x_a << ", x_b = " << p.x_b
        << ", beta = " << p.beta << ": |dW/dw| = " << sol.residual << " > " << sol.tolerance;
    throw ConvergenceError(msg.str());
  }
  return sol;
}

GapSolution optimize_omega_real_at(const OscillatorParams& params, double x_a, double x_b,
                                   cplx time, const OptimizerOptions& opts) {
  params.validate();
  if (!(std::isfinite(x_a) && std::isfinite(x_b) && std::isfinite(time.real()) &&
        std::isfinite(time.imag()) && time.imag() <= 0.0 &&
        (time.imag() < 0.0 || time.real() > 0.0))) {
    throw DomainError("real-time point needs finite endpoints and Im T <= 0, T != 0");
  }

  constexpr double kInvalid = std::numeric_limits<double>::infinity();
  auto residual = [&](double w) -> cplx {
    return gap_residual_real_at(params, x_a, x_b, time, w);
  };
  auto magnitude = [&](double w) -> double {
    try {
      return std::abs(residual(w));
    } catch (const CausticError&) {
      return kInvalid;
    }
  };

  const std::vector<double> grid =
      scan_grid(reference_frequency(params, x_a, x_b, std::abs(time)), opts);
  std::vector<double> mag(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) mag[i] = magnitude(grid[i]);

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(mag[i])) continue;
    const bool left_ok = i == 0 || mag[i] <= mag[i - 1];
    const bool right_ok = i + 1 == grid.size() || mag[i] <= mag[i + 1];
    if (left_ok && right_ok) candidates.push_back(i);
  }
  if (candidates.empty()) {
    throw ConvergenceError("no finite residual in the real-time scan window");
  }
  // A minimum on the window edge is not a local minimum; keep it only if
  // nothing interior exists.
  std::vector<std::size_t> interior;
  for (std::size_t i : candidates) {
    if (i != 0 && i + 1 != grid.size()) interior.push_back(i);
  }
  if (!interior.empty()) candidates = std::move(interior);

  auto refine = [&](std::size_t i) {
    GapSolution sol;
    const double lo = grid[i == 0 ? 0 : i - 1];
    const double hi = grid[std::min(i + 1, grid.size() - 1)];
    double w = brent_minimum([&](double x) { return magnitude(x); }, lo, hi);
    double m = magnitude(w);
    // Gauss-Newton on |r|^2 for real w.
    for (int step = 0; step < 2 * opts.newton_steps && std::isfinite(m) && m > 0.0; ++step) {
      const double h = 1e-6 * w;
      cplx slope;
      try {
        slope = (residual(w + h) - residual(w - h)) / (2.0 * h);
      } catch (const CausticError&) {
        break;
      }
      const double s2 = std::norm(slope);
      if (!(s2 > 0.0)) break;
      const double candidate = w - (std::conj(slope) * residual(w)).real() / s2;
      if (!(candidate >= lo && candidate <= hi)) break;
      const double m_candidate = magnitude(candidate);
      if (!(m_candidate < m)) break;
      w = candidate;
      m = m_candidate;
    }
    const cplx beta_e = kernels::detail::euclidean_time_from_real(time, w);
    const auto e = evaluate<cplx>(params, x_a, x_b, beta_e, w, true);
    sol.omega_star = w;
    sol.residual = std::abs(e.residual);
    sol.bracket = {lo, hi};
    sol.tolerance = std::max(opts.tol_root * std::max(1.0, std::abs(e.log_amplitude) / w), e.noise);
    sol.fallback_used = sol.residual > sol.tolerance;
    return sol;
  };

  // Stationary candidates: the largest one, as in imaginary time. Otherwise the
  // minimum of the scale-free sensitivity |dW/dw| w / max(1, |W|); the raw
  // |dW/dw| is always small near w -> 0 and would pick that edge.
  const int n_candidates = static_cast<int>(candidates.size());
  std::vector<GapSolution> refined;
  std::vector<double> score;
  for (std::size_t i : candidates) {
    GapSolution sol = refine(i);
    sol.n_roots = n_candidates;
    const double w_abs = std::abs(w1_real_at(params, x_a, x_b, time, sol.omega_star));
    score.push_back(sol.residual * sol.omega_star / std::max(1.0, w_abs));
    refined.push_back(sol);
  }
  for (auto it = refined.rbegin(); it != refined.rend(); ++it) {
    if (!it->fallback_used) return *it;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < refined.size(); ++i) {
    if (score[i] < score[best]) best = i;
  }
  return refined[best];
}

GapSolution optimize_omega_real(const OscillatorParams& params, const RealTimePoint& p,
                                const OptimizerOptions& opts) {
  p.validate();
  return optimize_omega_real_at(params, p.x_a, p.x_b, cplx(p.time, 0.0), opts);
}

ImagAmplitude amplitude_imag(const OscillatorParams& params, const EuclideanPoint& p,
                             const OptimizerOptions& opts) {
  ImagAmplitude out;
  out.point = p;
  out.gap = optimize_omega_imag(params, p, opts);
  out.w_value = w1_imag(params, p, out.gap.omega_star);
  return out;
}

RealAmplitude amplitude_real(const OscillatorParams& params, const RealTimePoint& p,
                             const OptimizerOptions& opts) {
  RealAmplitude out;
  out.point = p;
  out.gap = optimize_omega_real(params, p, opts);
  out.w_value = w1_real(params, p, out.gap.omega_star);
  return out;
}

}  // namespace oeprop::oep
