#pragma once

#include <stdexcept>
#include <string>

namespace frtsim {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Topology references that do not resolve (dangling bus ids, unknown branches).
class StructuralError : public Error {
  public:
    using Error::Error;
};

/// An operation that is illegal in the current state (double fault apply, clear without apply).
class StateError : public Error {
  public:
    using Error::Error;
};

/// Invalid argument values to planning or conversion routines.
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// Singular network, residual blow-up, or divergence during a run.
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// The pre-run settle did not reach equilibrium or the dispatch is infeasible.
class InitializationError : public Error {
  public:
    using Error::Error;
};

/// Scenario text that fails to parse or validate. Line/column are 1-based, 0 when unknown.
class InputError : public Error {
  public:
    InputError(const std::string& what, int line = 0, int column = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ", column " +
                               std::to_string(column) + ")"
                         : what),
          line_(line),
          column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

  private:
    int line_;
    int column_;
};

}  // namespace frtsim
