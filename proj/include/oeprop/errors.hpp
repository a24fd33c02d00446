#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oeprop {

// Base for all numerical failures. `name()` is the stable identifier printed by
// the command-line tool and written to CSV error columns.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual std::string_view name() const noexcept = 0;
};

#define OEPROP_DEFINE_ERROR(Type)                                          \
  class Type : public Error {                                              \
   public:                                                                 \
    using Error::Error;                                                    \
    std::string_view name() const noexcept override { return #Type; }      \
  }

/// Invalid arguments: non-finite values, beta <= 0, lambda < 0, ...
OEPROP_DEFINE_ERROR(DomainError);
/// Real-time harmonic prefactor singular (|sin(omega*T)| below tolerance).
OEPROP_DEFINE_ERROR(CausticError);
/// Iterative solver did not reach its tolerance.
OEPROP_DEFINE_ERROR(ConvergenceError);
/// Adaptive quadrature gave up before reaching the requested accuracy.
OEPROP_DEFINE_ERROR(QuadratureError);
/// Spectral sum not converged for the retained levels.
OEPROP_DEFINE_ERROR(TruncationError);
/// Basis-function recurrence left the representable range.
OEPROP_DEFINE_ERROR(RangeError);

#undef OEPROP_DEFINE_ERROR

}  // namespace oeprop
