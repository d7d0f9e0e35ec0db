// Copyright the lsth authors. Licensed under the terms of the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <stdexcept>
#include <string>

namespace lsth {

// Root of all harness/engine errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Configuration / workload document errors.
class SyntaxError : public Error {
 public:
  using Error::Error;
};
class ValidationError : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Task library errors.
class TaskNotFound : public Error {
 public:
  using Error::Error;
};
class EmptyTask : public Error {
 public:
  using Error::Error;
};
class MissingVariable : public Error {
 public:
  explicit MissingVariable(const std::string& name)
      : Error("unbound variable: ${" + name + "}"), variable(name) {}
  std::string variable;
};

// Custom task generators.
class GeneratorNotFound : public Error {
 public:
  using Error::Error;
};
class GeneratorError : public Error {
 public:
  using Error::Error;
};

// Connector / engine errors. Semantic statement failures (unknown table,
// schema mismatch, missing version) all derive from ExecError so callers
// that only care about "the statement failed" can catch one type.
class TargetUnreachable : public Error {
 public:
  using Error::Error;
};
class ParseError : public Error {
 public:
  using Error::Error;
};
class ExecError : public Error {
 public:
  using Error::Error;
};
class UnknownTable : public ExecError {
 public:
  explicit UnknownTable(const std::string& table) : ExecError("unknown table: " + table) {}
};
class SchemaMismatch : public ExecError {
 public:
  using ExecError::ExecError;
};
class VersionNotFound : public ExecError {
 public:
  using ExecError::ExecError;
};
class ConflictError : public Error {
 public:
  using Error::Error;
};
class IOFailure : public Error {
 public:
  using Error::Error;
};

// Telemetry / metrics errors.
class FormatError : public Error {
 public:
  using Error::Error;
};
class UnknownPhase : public Error {
 public:
  using Error::Error;
};
class InsufficientData : public Error {
 public:
  using Error::Error;
};
class DivisionByZero : public Error {
 public:
  using Error::Error;
};

}  // namespace lsth
