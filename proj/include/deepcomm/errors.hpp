#pragma once

#include <stdexcept>
#include <string>

namespace deepcomm {

// Precondition violations on library calls (bad ids, out-of-range budgets).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or unreadable input data.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Solver breakdown or a numerical precondition that does not hold
// (e.g. asking for a Fiedler vector of a disconnected graph).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace deepcomm
