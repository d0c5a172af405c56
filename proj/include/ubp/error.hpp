#pragma once

#include <stdexcept>
#include <string>

namespace ubp {

// Caller broke a documented precondition (shape mismatch, bad index, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Input is well-formed but numerically degenerate (zero row, zero variance).
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Missing or inconsistent data (cache entry absent, empty dataset).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file contents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values or unknown keys.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Confidence interval requested before the tracker finished warmup.
class NotReady : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The finite-difference oracle hit a non-finite function value.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

}  // namespace ubp
