#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

namespace oeprop::detail {

struct StationaryPoint {
  double x = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  int n_roots = 0;
  bool from_root = false;  // false: minimal |f| fallback
};

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Root of a real residual on an increasing grid. Picks the sign change at the
// largest abscissa, bisects it to `rel_width`, then applies up to
// `newton_steps` Newton steps (finite-difference slope) that must stay inside
// the bracket and reduce |f|. Without a sign change returns the Brent minimum
// of |f| around the smallest grid value of |f|.
template <class F>
StationaryPoint largest_root(F&& f, std::span<const double> grid, double rel_width,
                             int newton_steps) {
  std::vector<double> r(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) r[i] = f(grid[i]);

  StationaryPoint out;
  std::ptrdiff_t last = -1;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (r[i] == 0.0 || sign_of(r[i]) * sign_of(r[i + 1]) < 0) {
      ++out.n_roots;
      last = static_cast<std::ptrdiff_t>(i);
    }
  }
  if (!grid.empty() && r.back() == 0.0) {
    ++out.n_roots;
    last = static_cast<std::ptrdiff_t>(grid.size() - 1);
  }

  if (last < 0) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (std::abs(r[i]) < std::abs(r[best])) best = i;
    }
    // Residuals of functions of w^2 vanish like w, so a minimum on the lower
    // edge continues towards w -> 0; follow it four decades further down.
    const double lo = best == 0 ? 1e-4 * grid[0] : grid[best - 1];
    const double hi = grid[std::min(best + 1, grid.size() - 1)];
    std::uintmax_t iterations = 200;
    const auto m = boost::math::tools::brent_find_minima(
        [&](double x) { return std::abs(f(x)); }, lo, hi, 40, iterations);
    out.x = m.first;
    out.bracket = {lo, hi};
    return out;
  }

  const auto k = static_cast<std::size_t>(last);
  double lo = grid[k];
  double hi = k + 1 < grid.size() ? grid[k + 1] : grid[k];
  double f_lo = r[k];
  if (f_lo == 0.0) {
    hi = lo;
  } else if (r[k + 1] == 0.0) {
    lo = hi;
  }
  while (hi - lo > rel_width * 0.5 * (lo + hi)) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) {
      lo = hi = mid;
      break;
    }
    if (sign_of(f_mid) == sign_of(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }

  double x = 0.5 * (lo + hi);
  double f_x = f(x);
  for (int step = 0; step < newton_steps && f_x != 0.0; ++step) {
    const double h = 1e-6 * std::abs(x);
    const double slope = (f(x + h) - f(x - h)) / (2.0 * h);
    if (!(std::isfinite(slope) && slope != 0.0)) break;
    const double candidate = x - f_x / slope;
    if (!(candidate >= lo && candidate <= hi)) break;
    const double f_candidate = f(candidate);
    if (!(std::abs(f_candidate) < std::abs(f_x))) break;
    x = candidate;
    f_x = f_candidate;
  }
  out.x = x;
  out.bracket = {lo, hi};
  out.from_root = true;
  return out;
}

// Logarithmic grid of `points` values spanning [center 10^-decades, center 10^decades].
std::vector<double> log_grid(double center, double decades, int points);

}  // namespace oeprop::detail
