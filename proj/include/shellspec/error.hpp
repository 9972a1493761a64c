#pragma once

#include <stdexcept>
#include <string>

namespace shellspec {

enum class ErrorKind {
  Overflow,          // non-finite state while shooting
  SearchExhausted,   // no eigenvalue bracket below the configured ceiling
  Domain,            // argument outside the valid interval
  Consistency,       // an identity that must hold did not
  Geometry,          // degenerate or non-convex input body
  Convexity,
  Meshing,
  DegenerateProblem,
  Singularity,       // factorization failed
  FlowDegenerate,
  Remesh,
  Precondition,
  Usage,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace shellspec
