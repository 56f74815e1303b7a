#pragma once

#include <stdexcept>
#include <string>

namespace mistake_lab {

/// Malformed input documents (class files, tree files, rationals).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its domain: unknown instance, empty
/// version space, horizon exhausted, bad numeric argument.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A guarded exhaustive computation exceeded its configured state budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The online protocol was broken (prediction outside [0,1], unrealizable
/// play where realizability was promised).
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mistake_lab
