#include "oeprop/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "oeprop/errors.hpp"

namespace oeprop::quad {
namespace {

// Kronrod abscissae (positive half, descending) and weights; Gauss-7 weights
// apply to the odd-indexed Kronrod nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr std::size_t kNodes = 15;

struct Panel {
  double a;
  double b;
  int depth;
  double value = 0.0;
  double error = 0.0;
};

// Node i of a panel, ordered left to right.
double node(const Panel& p, std::size_t i) {
  const double center = 0.5 * (p.a + p.b);
  const double half = 0.5 * (p.b - p.a);
  if (i < 7) return center - half * kXgk[i];
  if (i == 7) return center;
  return center + half * kXgk[14 - i];
}

void finish_panel(Panel& p, std::span<const double> fv) {
  const double half = 0.5 * (p.b - p.a);
  double kronrod = kWgk[7] * fv[7];
  double gauss = kWg[3] * fv[7];
  for (std::size_t j = 0; j < 7; ++j) {
    const double pair = fv[j] + fv[14 - j];
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  p.value = kronrod * half;
  p.error = std::abs((kronrod - gauss) * half);
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opts) {
  Result res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  const double length = std::abs(b - a);

  std::vector<Panel> pending{Panel{a, b, 0}};
  std::vector<Panel> accepted;
  bool exhausted = false;

  while (!pending.empty()) {
    std::vector<double> fv(pending.size() * kNodes);
    parallel_for(fv.size(), opts.parallel, [&](std::size_t k) {
      fv[k] = f(node(pending[k / kNodes], k % kNodes));
    });
    res.evaluations += fv.size();
    for (std::size_t i = 0; i < pending.size(); ++i) {
      finish_panel(pending[i], std::span<const double>(fv).subspan(i * kNodes, kNodes));
    }

    double estimate = 0.0;
    for (const auto& p : accepted) estimate += p.value;
    for (const auto& p : pending) estimate += p.value;
    const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(estimate));

    std::vector<Panel> next;
    for (const auto& p : pending) {
      const double share = tol * std::abs(p.b - p.a) / length;
      const bool can_split = p.depth < opts.max_depth &&
                             accepted.size() + next.size() + 2 <= opts.max_panels;
      if (p.error <= share || !std::isfinite(p.value) || !can_split) {
        if (p.error > share) exhausted = true;
        accepted.push_back(p);
      } else {
        const double mid = 0.5 * (p.a + p.b);
        next.push_back(Panel{p.a, mid, p.depth + 1});
        next.push_back(Panel{mid, p.b, p.depth + 1});
      }
    }
    pending = std::move(next);
  }

  std::sort(accepted.begin(), accepted.end(),
            [](const Panel& l, const Panel& r) { return l.a < r.a; });
  std::vector<double> values(accepted.size());
  std::vector<double> errors(accepted.size());
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    values[i] = accepted[i].value;
    errors[i] = accepted[i].error;
  }
  res.value = pairwise_sum(values);
  res.error = pairwise_sum(errors);
  const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(res.value));
  res.converged = std::isfinite(res.value) && (!exhausted || res.error <= tol);
  return res;
}

Result integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                          const Options& opts) {
  Result res = integrate(f, a, b, opts);
  if (!res.converged) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "adaptive quadrature on [" << a << ", " << b << "] did not converge: value "
        << res.value << ", error estimate " << res.error;
    throw QuadratureError(msg.str());
  }
  return res;
}

}  // namespace oeprop::quad
