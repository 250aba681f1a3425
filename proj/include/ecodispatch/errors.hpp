#pragma once

#include <stdexcept>
#include <string>

namespace ecodispatch {

// Invalid numeric argument (bad coordinate, negative rate, degenerate distance).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input file does not follow the expected column layout.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A single record failed validation.
class RowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Search space or frontier exceeds a configured guard.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Empty candidate set handed to an assignment policy.
class NoDriverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition on an aggregate (e.g. incomplete plan).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ecodispatch
