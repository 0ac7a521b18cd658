#pragma once

#include <stdexcept>
#include <string>

namespace smt {

enum class ErrorKind {
  Syntax,
  Reference,
  Duplicate,
  Validation,
  Characterization,
  Contract,
  InfeasibleTiming,
  InfeasibleClustering,
  Io,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Process exit code the CLI uses for an error of this kind.
int exit_code(ErrorKind kind);

}  // namespace smt
