#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cantor {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A sub-operation's precondition failed on its argument enclosure
// (division by an interval containing 0, ln of a non-positive value, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message)
      : Error("parse error at offset " + std::to_string(offset) + ": " + message),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class NotDifferentiable : public Error {
 public:
  using Error::Error;
};

class RankCapExceeded : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// A descendant of a certified square no longer satisfies the certificate's
// conditions. Indicates a certifier bug.
class ConditionLost : public Error {
 public:
  using Error::Error;
};

}  // namespace cantor
