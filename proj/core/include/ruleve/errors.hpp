#pragma once

#include <stdexcept>
#include <string>

namespace ruleve {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Input text could not be tokenized/parsed.  Positions are 1-based.
class ParseError : public Error {
public:
  ParseError(int line, int col, const std::string& what)
      : Error(what), line(line), col(col) {}
  int line;
  int col;
};

// Input parsed but violates a local well-formedness rule (undeclared name,
// row sum off, probability out of range, ...).  Positions are 1-based.
class SemanticError : public Error {
public:
  SemanticError(int line, int col, const std::string& what)
      : Error(what), line(line), col(col) {}
  int line;
  int col;
};

// A rule base failed a structural requirement that an operation relies on
// (e.g. zero or two applicable rules for a variable in some context).
class MalformedRuleBase : public Error {
public:
  using Error::Error;
};

// An exhaustive enumeration would exceed the caller-supplied cap.
class EnumerationBudgetExceeded : public Error {
public:
  using Error::Error;
};

// The observed evidence has probability zero under the model.
class ImpossibleEvidence : public Error {
public:
  using Error::Error;
};

// An operator was pointed at a rule/variable it cannot apply to.
class InvalidTarget : public Error {
public:
  using Error::Error;
};

// A resolution family does not cover every value of the resolved variable.
class IncompleteFamily : public Error {
public:
  using Error::Error;
};

// A parameter perturbation would leave [0, 1].
class OutOfRange : public Error {
public:
  using Error::Error;
};

// An intermediate rule set grew past the configured cap.
class ResourceLimit : public Error {
public:
  using Error::Error;
};

// A caller passed something unusable (bad ordering, unknown name, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

}  // namespace ruleve
