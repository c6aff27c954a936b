#pragma once

#include <stdexcept>
#include <string>

namespace unitsel {

// Base of every error raised by the library. Derived types let callers map
// failures to distinct exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// A count table whose required total is zero.
class ZeroTotal : public Error {
 public:
  using Error::Error;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

// Tables that violate a probability invariant or the general relation.
class InvalidData : public Error {
 public:
  using Error::Error;
};

class InvalidQuery : public Error {
 public:
  using Error::Error;
};

// n^m exceeded the configured response-type guard.
class SizeLimitExceeded : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class RejectionCapExceeded : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

}  // namespace unitsel
