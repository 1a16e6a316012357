#pragma once

#include <stdexcept>
#include <string>

namespace fefp {

/// Raised when a cell's state cannot support the requested closure
/// (too few particles, non-positive temperature, ill-conditioned system).
/// Callers are expected to fall back to the linear-drift model.
class DegenerateCellError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Polynomial degree exceeded the supported moment order.
class DegreeOverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A diagnostic metric is not defined for the given input (e.g. flat profile).
class UndefinedMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite particle state detected during time integration.
class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fefp
