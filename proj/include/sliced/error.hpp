#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sliced {

enum class ErrorKind {
  Syntax,
  Semantic,
  DuplicateName,
  DanglingEndpoint,
  MultiSourceLine,
  AmbiguousMatch,
  MissingParameter,
  EmptyDomain,
  UnboundInput,
  MultipleDrivers,
  CombinationalCycle,
  UnknownInstance,
  UnknownVariable,
  InvalidErrorState,
  MissingClock,
  UnsupportedConstruct,
  BoundaryValueAbsent,
  UnresolvedChoice,
  ScriptConflict,
  IllegalStep,
  DomainViolation,
  Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sliced
