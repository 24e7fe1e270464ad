#pragma once

#include <stdexcept>
#include <string>

namespace feyn {

enum class ErrorKind {
  Parse,
  SelfLoop,
  Disconnected,
  EmptySubset,
  EmptyEdgeSet,
  OverlappingVertexSets,
  VariableMismatch,
  GeneratorMismatch,
  ConstraintViolated,
  NonPositiveT,
  NonPositiveEpsilon,
  CoincidentPoints,
  DegreeMismatch,
  NonConvergence,
  NotLaman,
  Assertion,
  InvalidArgument,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace feyn
