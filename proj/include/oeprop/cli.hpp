#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oeprop/kernels.hpp"
#include "oeprop/observables.hpp"
#include "oeprop/thermo.hpp"

namespace oeprop::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Grid spec: a single value, a comma list, or start:stop:count with
/// inclusive endpoints (linear; prefix "log:" for logarithmic spacing).
/// Throws DomainError on malformed specs or non-increasing values.
std::vector<double> parse_grid(std::string_view spec);

/// Comma list of method names, returned sorted and without duplicates.
std::vector<Method> parse_methods(std::string_view spec);

struct RunConfig {
  OscillatorParams params;
  std::vector<Method> methods{Method::EXACT, Method::FK, Method::OEF, Method::OEP};
  std::string beta_spec = "1";
  std::vector<double> betas{1.0};
  std::string x_grid_spec;   // empty: command default
  std::vector<double> x_grid;
  thermo::ThermoOptions thermo;
  unsigned threads = 1;

  // propagator
  double x_a = 0.0;
  double x_b = 0.0;
  double time = 1.0;
  bool real_mode = false;
  std::optional<double> omega;  // forced trial frequency

  /// Throws DomainError when a field is out of range.
  void validate() const;
  /// `#`-prefixed lines echoing everything that affects the output.
  std::string header(std::string_view command) const;
};

// Each command returns the full output text. Per-row numerical failures in the
// sweeps are recorded in the output; propagator and exact-spectrum throw.
std::string cmd_free_energy(const RunConfig& cfg);
std::string cmd_density(const RunConfig& cfg);
std::string cmd_density_matrix(const RunConfig& cfg);
std::string cmd_propagator(const RunConfig& cfg);
std::string cmd_exact_spectrum(const RunConfig& cfg);

/// Parses arguments, runs one subcommand, writes to --out or `out`.
/// Returns one of the exit codes above.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oeprop::cli
