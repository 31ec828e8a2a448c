#pragma once

#include <stdexcept>
#include <string>

namespace varex {

/// Invalid grid construction or a field/grid shape mismatch.
struct GridError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pointwise domain violation (exponent <= 1, nonpositive weight, ...).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A check was asked to run on data violating its standing hypotheses
/// (unbounded norm sequence, failed integrability condition, ...).
struct HypothesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed configuration. `key` names the offending entry.
struct ConfigError : std::runtime_error {
  std::string key;
  ConfigError(std::string k, const std::string& what)
      : std::runtime_error("config key '" + k + "': " + what), key(std::move(k)) {}
};

/// Solver failed to converge; message carries diagnostics.
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace varex
