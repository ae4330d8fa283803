#pragma once

#include <stdexcept>
#include <string>

namespace solarzoning {

// Malformed input that fails a documented schema or value constraint.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tabular / GeoJSON / config text that could not be read.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace solarzoning
