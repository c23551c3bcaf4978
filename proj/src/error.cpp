#include "sliced/error.hpp"

namespace sliced {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::Semantic: return "SemanticError";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::DanglingEndpoint: return "DanglingEndpoint";
    case ErrorKind::MultiSourceLine: return "MultiSourceLine";
    case ErrorKind::AmbiguousMatch: return "AmbiguousMatch";
    case ErrorKind::MissingParameter: return "MissingParameter";
    case ErrorKind::EmptyDomain: return "EmptyDomain";
    case ErrorKind::UnboundInput: return "UnboundInput";
    case ErrorKind::MultipleDrivers: return "MultipleDrivers";
    case ErrorKind::CombinationalCycle: return "CombinationalCycle";
    case ErrorKind::UnknownInstance: return "UnknownInstance";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::InvalidErrorState: return "InvalidErrorState";
    case ErrorKind::MissingClock: return "MissingClock";
    case ErrorKind::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorKind::BoundaryValueAbsent: return "BoundaryValueAbsent";
    case ErrorKind::UnresolvedChoice: return "UnresolvedChoice";
    case ErrorKind::ScriptConflict: return "ScriptConflict";
    case ErrorKind::IllegalStep: return "IllegalStep";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

}  // namespace sliced
