#pragma once

#include <stdexcept>
#include <string>

namespace cycleweights {

/// Invalid parameters or inputs supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation could not produce a finite, trustworthy result
/// (overflow, root not bracketed, truncation not converged, budget exceeded).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested (family, statistic) pair has no known limit law.
class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cycleweights
