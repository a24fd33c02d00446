#pragma once

#include <string_view>
#include <vector>

namespace oeprop {

// Ordered by name so sorted output follows enum order.
enum class Method { EXACT, FK, OEF, OEP };

std::string_view method_name(Method m);
/// Parses "OEP", "OEF", "FK", "EXACT" (case-insensitive); throws DomainError otherwise.
Method parse_method(std::string_view s);

struct FreeEnergyResult {
  double beta = 0.0;
  double f = 0.0;
  Method method = Method::OEP;
  // OEF: optimized w. FK: Omega(x0 = 0), negative when Omega^2 < 0.
  // OEP: w*(0) on the diagonal. EXACT: E0.
  double omega_diag = 0.0;
  // Quadrature error propagated to f (OEP, FK); spectral tail bound (EXACT); 0 for OEF.
  double err_est = 0.0;
};

struct DensityProfile {
  std::vector<double> grid;
  std::vector<double> rho;
  double beta = 0.0;
  double normalization_error = 0.0;  // |trapezoid(rho) - 1| on grid
};

struct DensityMatrixEntry {
  double x_a = 0.0;
  double x_b = 0.0;
  double value = 0.0;
  double beta = 0.0;
};

/// Trapezoid rule on an ordered, possibly non-uniform grid.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace oeprop
