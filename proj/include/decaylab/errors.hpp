#pragma once

#include <stdexcept>
#include <string>

namespace decaylab {

/// Base of every error raised by the library. `name()` is the stable
/// machine-readable tag written into CLI error records.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual const char* name() const noexcept { return "error"; }
};

#define DECAYLAB_DEFINE_ERROR(Type, tag)                                  \
  class Type : public Error {                                             \
   public:                                                                \
    using Error::Error;                                                   \
    [[nodiscard]] const char* name() const noexcept override { return tag; } \
  };

/// Invalid argument: non-positive rate, non-finite W, negative time, bad grid.
DECAYLAB_DEFINE_ERROR(DomainError, "domain_error")
/// Root bracketing failed (pathological rates).
DECAYLAB_DEFINE_ERROR(SolverError, "solver_error")
/// Γ̃ = 0: the pair never disentangles.
DECAYLAB_DEFINE_ERROR(NoDecayError, "no_decay_error")
/// Inconsistent event data.
DECAYLAB_DEFINE_ERROR(DataError, "data_error")
DECAYLAB_DEFINE_ERROR(InsufficientDataError, "insufficient_data_error")
/// Photons without pair identity cannot be tagged first/second.
DECAYLAB_DEFINE_ERROR(UnclassifiableError, "unclassifiable_error")
DECAYLAB_DEFINE_ERROR(ParseError, "parse_error")
DECAYLAB_DEFINE_ERROR(IoError, "io_error")

#undef DECAYLAB_DEFINE_ERROR

}  // namespace decaylab
