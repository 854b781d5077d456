#pragma once

#include <stdexcept>
#include <string>

namespace ifsg {

// Letter outside 1..m, or a word used with the wrong system.
struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Mathematically undefined request (fixed point of a non-contraction, empty cover, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Caller broke an operation's precondition.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct PrecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation would exceed its leaf/pair budget. `achievable` carries the
// finest tolerance that fits (or the deepest one reached), when known.
struct ResourceError : std::runtime_error {
  ResourceError(const std::string& what, double achievable)
      : std::runtime_error(what), achievable(achievable) {}
  double achievable;
};

// The computation ran but could not reach a stable answer.
struct InconclusiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ifsg
