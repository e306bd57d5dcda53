#pragma once

#include <stdexcept>
#include <string>

namespace snetfdr {

/// Absolute-continuity violation or other out-of-domain evaluation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid parameters, rule settings, sample budgets or config files.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical routine failed to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation not available for this kind of observation model.
class UnsupportedModel : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Object placement could not satisfy its constraints.
class PlacementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace snetfdr
