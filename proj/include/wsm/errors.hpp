#pragma once

#include <stdexcept>
#include <string>

namespace wsm {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto exit statuses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input text did not follow one of the accepted file/formula grammars.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// An exhaustive routine was asked to run beyond its configured size limit.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// The caller broke an operation's precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A postcondition that the algorithm relies on failed to hold.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// The graph's rank-width is exactly c+1, where the split-module relation is
// not guaranteed to be an equivalence.
class BelowThreshold : public Error {
 public:
  using Error::Error;
};

// No type-equivalent representative exists within the size cap.
class SearchExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace wsm
