#pragma once

#include <stdexcept>
#include <string>

namespace dmme {

// Base class for every error thrown by this library, so callers can
// distinguish our diagnostics from generic std exceptions.
struct error : std::runtime_error {
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: malformed config files, unknown keys, out-of-range
// parameter values, invalid CLI arguments.
struct validation_error : error {
  using error::error;
};

// A physical precondition failed at runtime: non-density-matrix state,
// degenerate invariant spectrum, negative rate fed to a generator,
// non-unitary transformation matrix, and the like.
struct domain_error : error {
  using error::error;
};

// Requested combination is outside the implemented regime, e.g. the
// Lamb-shift correction at nonzero temperature.
struct unsupported_error : error {
  using error::error;
};

// An internal consistency check tripped (integration failure, residual
// above tolerance).  Indicates a bug or an unusable parameter set.
struct consistency_error : error {
  using error::error;
};

}  // namespace dmme
