#pragma once

#include <stdexcept>
#include <string>

namespace stlverify {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Incompatible matrix/vector/set dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Specification text could not be parsed; carries a 1-based position.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(msg + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Numerical failure inside the LP solver (distinct from infeasibility).
class LpError : public Error {
public:
    using Error::Error;
};

/// A floating-point quantity left the representable range, e.g. the
/// Taylor remainder for very large ||A||*dt.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// Time discretization made part of the formula unsatisfiable; the caller
/// is expected to refine the time step.
class DiscretizationError : public Error {
public:
    using Error::Error;
};

/// A configured resource cap (polytope count, MILP nodes, truncation
/// order) was exceeded.
class CapError : public Error {
public:
    using Error::Error;
};

} // namespace stlverify
