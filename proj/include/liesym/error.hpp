#pragma once

#include <stdexcept>
#include <string>

namespace liesym {

/// Base class for all liesym errors.
class Error : public std::runtime_error {
  public:
	explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

/// Malformed expression (unregistered symbol, bad arity, ...).
class MalformedExpressionError : public Error {
  public:
	using Error::Error;
};

/// Expression syntax errors carry a line/column position.
class ParseError : public Error {
  public:
	ParseError(const std::string &msg, int line, int column)
	    : Error(msg + " (line " + std::to_string(line) + ", column " +
	            std::to_string(column) + ")"),
	      line(line), column(column)
	{}
	int line;
	int column;
};

/// Division by an identically-zero denominator.
class DivisionByZeroError : public Error {
  public:
	using Error::Error;
};

/// Equation cannot be solved for the requested leading derivative.
class NotSolvableError : public Error {
  public:
	using Error::Error;
};

/// Substitution rules contradict each other on the manifold.
class InconsistencyError : public Error {
  public:
	using Error::Error;
};

/// Vector field too degenerate for the requested operation.
class DegenerateFieldError : public Error {
  public:
	using Error::Error;
};

/// Canonical coordinates outside the supported constructive classes.
class NotDerivableError : public Error {
  public:
	using Error::Error;
};

/// Supplied coordinate change fails the defining conditions.
class InvalidCoordinatesError : public Error {
  public:
	using Error::Error;
};

/// Symbolic result contradicted by the randomized numeric check.
class NumericDisagreementError : public Error {
  public:
	using Error::Error;
};

} // namespace liesym
