#include "oeprop/moments.hpp"

#include <array>
#include <cassert>
#include <cmath>
#include <numbers>

namespace oeprop::kernels {
namespace {

constexpr int kMaxPower = 4;
constexpr int kSeriesTerms = 40;
constexpr int kPolyLength = 2 * kMaxPower + 1;
// Every (tau - sigma) divides 840 = lcm(1..8), so the q-polynomial tables are
// accumulated exactly as integer multiples of 1/840.
constexpr long long kDenominator = 840;

struct MomentTable {
  // Exponential route: value = 2^(r-n) (1-q^2)^-r [P(q) + B Q(q)].
  std::array<double, kPolyLength> P{};
  std::array<double, kPolyLength> Q{};
  // Series route: value = B^(n+1-r) A(B^2) / (sinh(B)/B)^r.
  std::array<double, kSeriesTerms> A{};
};

long long binomial(int n, int k) {
  long long out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

class Tables {
 public:
  Tables() {
    std::array<double, 2 * kSeriesTerms + 2 * kMaxPower + 4> factorial{};
    factorial[0] = 1.0;
    for (std::size_t i = 1; i < factorial.size(); ++i) {
      factorial[i] = factorial[i - 1] * static_cast<double>(i);
    }
    auto beta_fn = [&](int x, int y) {
      return factorial[x - 1] * factorial[y - 1] / factorial[x + y - 1];
    };

    // Coefficients of (sinh(y)/y)^p in powers of y^2.
    std::array<std::array<double, kSeriesTerms>, kMaxPower + 1> shape{};
    shape[0][0] = 1.0;
    for (int p = 1; p <= kMaxPower; ++p) {
      for (int i = 0; i < kSeriesTerms; ++i) {
        double acc = 0.0;
        for (int k = 0; k <= i; ++k) acc += shape[p - 1][i - k] / factorial[2 * k + 1];
        shape[p][i] = acc;
      }
    }

    for (int p = 0; p <= kMaxPower; ++p) {
      for (int q = 0; q <= kMaxPower; ++q) {
        for (int r = std::max(p, q); r <= p + q; ++r) {
          MomentTable& t = at(p, q, r);
          std::array<long long, kPolyLength> pnum{};
          std::array<long long, kPolyLength> qnum{};
          for (int i = 0; i <= p; ++i) {
            for (int j = 0; j <= q; ++j) {
              long long coef = binomial(p, i) * binomial(q, j);
              if (((p - i) + (q - j)) % 2 != 0) coef = -coef;
              const int sigma = 2 * i - p;
              const int tau = 2 * j - q;
              if (tau != sigma) {
                const long long part = coef * kDenominator / (tau - sigma);
                pnum[r - tau] += part;
                pnum[r - sigma] -= part;
              } else {
                qnum[r - sigma] += coef * kDenominator;
              }
            }
          }
          for (int k = 0; k < kPolyLength; ++k) {
            t.P[k] = static_cast<double>(pnum[k]) / kDenominator;
            t.Q[k] = static_cast<double>(qnum[k]) / kDenominator;
          }
          for (int jj = 0; jj < kSeriesTerms; ++jj) {
            double acc = 0.0;
            for (int k = 0; k <= jj; ++k) {
              const int l = jj - k;
              acc += shape[p][k] * shape[q][l] * beta_fn(p + 2 * k + 1, q + 2 * l + 1);
            }
            t.A[jj] = acc;
          }
        }
      }
    }
  }

  const MomentTable& get(int p, int q, int r) const {
    return tables_[p][q][r];
  }

 private:
  MomentTable& at(int p, int q, int r) { return tables_[p][q][r]; }
  std::array<std::array<std::array<MomentTable, 2 * kMaxPower + 1>, kMaxPower + 1>,
             kMaxPower + 1>
      tables_{};
};

const Tables& tables() {
  static const Tables instance;
  return instance;
}

// sinh(B)/B and its derivative, series form for |B| <= kSeriesRadius.
template <class S>
void sinhc_series(S B, S& value, S& derivative) {
  const S b2 = B * B;
  S term = 1.0;  // B^(2k) / (2k+1)!
  value = 1.0;
  derivative = 0.0;
  for (int k = 1; k < 30; ++k) {
    term *= b2 / static_cast<double>((2 * k) * (2 * k + 1));
    value += term;
    derivative += static_cast<double>(2 * k) * term / B;
  }
}

template <class S>
S ipow(S base, int e) {
  S out = 1.0;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

template <class S>
MomentValue<S> series_route(const MomentTable& t, int n, int r, S B) {
  const S b2 = B * B;
  S poly = 0.0;
  S dpoly = 0.0;  // d/dB of A(B^2)
  S power = 1.0;  // B^(2j)
  for (int j = 0; j < kSeriesTerms; ++j) {
    poly += t.A[j] * power;
    if (j + 1 < kSeriesTerms) dpoly += (2.0 * (j + 1)) * t.A[j + 1] * power * B;
    power *= b2;
  }
  S s1;
  S ds1;
  if (std::abs(B) < 1e-30) {
    s1 = 1.0;
    ds1 = 0.0;
  } else {
    sinhc_series(B, s1, ds1);
  }
  const int e = n + 1 - r;
  const S be = ipow(B, e);
  const S s1r = ipow(s1, r);
  MomentValue<S> out;
  out.value = be * poly / s1r;
  const S dbe = e == 0 ? S(0.0) : static_cast<double>(e) * ipow(B, e - 1);
  out.derivative = (dbe * poly + be * dpoly) / s1r - static_cast<double>(r) * be * poly * ds1 / (s1r * s1);
  return out;
}

template <class S>
MomentValue<S> exponential_route(const MomentTable& t, int n, int r, S B) {
  const S q = std::exp(-B);
  S P = 0.0, dP = 0.0, Qv = 0.0, dQ = 0.0;
  S power = 1.0;
  for (int k = 0; k < kPolyLength; ++k) {
    P += t.P[k] * power;
    Qv += t.Q[k] * power;
    dP -= static_cast<double>(k) * t.P[k] * power;
    dQ -= static_cast<double>(k) * t.Q[k] * power;
    power *= q;
  }
  const S F = P + B * Qv;
  const S dF = dP + Qv + B * dQ;
  const S q2 = q * q;
  const S one_minus = 1.0 - q2;
  const S denom = ipow(one_minus, r);
  const double scale = std::ldexp(1.0, r - n);
  MomentValue<S> out;
  out.value = scale * F / denom;
  out.derivative = scale * (dF / denom - 2.0 * static_cast<double>(r) * q2 * F / (denom * one_minus));
  return out;
}

}  // namespace

template <class S>
MomentValue<S> sinh_moment(int p, int q, int r, S B) {
  assert(p >= 0 && q >= 0 && p <= kMaxPower && q <= kMaxPower);
  assert(r >= std::max(p, q) && r <= p + q);
  const MomentTable& t = tables().get(p, q, r);
  const int n = p + q;
  if (std::abs(B) <= kSeriesRadius) return series_route(t, n, r, B);
  return exponential_route(t, n, r, B);
}

template MomentValue<double> sinh_moment<double>(int, int, int, double);
template MomentValue<cplx> sinh_moment<cplx>(int, int, int, cplx);

template <class S>
Hyperbolic<S> hyperbolic(S B) {
  Hyperbolic<S> h;
  if (std::abs(B) <= kSeriesRadius) {
    const S s = std::sinh(B);
    const S c = std::cosh(B);
    h.log_sinh = std::log(s);
    h.coth = c / s;
    h.csch = 1.0 / s;
    return h;
  }
  const S q = std::exp(-B);
  const S q2 = q * q;
  const S one_minus = 1.0 - q2;
  if constexpr (std::is_same_v<S, double>) {
    h.log_sinh = B - std::numbers::ln2 + std::log1p(-q2);
  } else {
    // 1 - q^2 has non-negative real part on Re B >= 0, so the principal log
    // is continuous there and reproduces the caustic count on the axis.
    h.log_sinh = B - std::numbers::ln2 + std::log(one_minus);
  }
  h.coth = (1.0 + q2) / one_minus;
  h.csch = 2.0 * q / one_minus;
  return h;
}

template Hyperbolic<double> hyperbolic<double>(double);
template Hyperbolic<cplx> hyperbolic<cplx>(cplx);

}  // namespace oeprop::kernels
